//! Serde adapters writing complex numbers as `[re, im]`.

use faer::c64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<S: Serializer>(z: &c64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<c64, D::Error> {
    let [re, im] = <[f64; 2]>::deserialize(d)?;
    Ok(c64::new(re, im))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[c64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(zs.iter().map(|z| [z.re, z.im]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<c64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| c64::new(re, im)).collect())
    }
}

pub mod vecvec {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[Vec<c64>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(vs.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<c64>>, D::Error> {
        let raw = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(raw.into_iter().map(|v| v.into_iter().map(|[re, im]| c64::new(re, im)).collect()).collect())
    }
}
