//! Cross-module checks at small sizes.

use std::f64::consts::FRAC_1_SQRT_2;

use brownlab::brownfield::{brown_laplacian, logdet_field, GridSpec};
use brownlab::matmodel::{build_m2_free_m2, realize};
use brownlab::rdiagonal::{brown_rdiagonal, catalog_brown, OperatorTag};
use brownlab::{c64, io, linalg};

#[test]
fn measure_file_to_radial_law() {
    let mu = io::measure_from_json(r#"{"atoms": [[1.0, 0.5], [0.0, 0.5]]}"#).unwrap();
    let law = brown_rdiagonal(&mu).unwrap();
    let catalog = catalog_brown(OperatorTag::W1F12);
    for k in 0..=20 {
        let r = FRAC_1_SQRT_2 * k as f64 / 20.0;
        assert!((law.cdf(r) - catalog.radial().cdf(r)).abs() < 1e-8, "r = {r}");
    }
}

#[test]
fn model_field_mass_sits_in_the_catalog_support() {
    let model = build_m2_free_m2(32, 17);
    let t = realize(OperatorTag::E12PlusF12, &model);
    let half = 1.1 * linalg::spectral_norm(&t).unwrap();
    let grid = GridSpec::square(c64::new(0.0, 0.0), half, 65, 1e-6).unwrap();
    let field = brown_laplacian(logdet_field(&t, &grid).unwrap()).unwrap();
    assert!((field.total_mass() - 1.0).abs() < 0.02, "{}", field.total_mass());
    // a cell diagonal of slack around the support disc
    let slack = grid.dx() * 2.0;
    let inside = field.mass_in_disc(c64::new(0.0, 0.0), FRAC_1_SQRT_2 + 0.05 + slack);
    assert!(inside > 0.97, "{inside}");
}

#[test]
fn spectrum_csv_round_trip() {
    let model = build_m2_free_m2(4, 3);
    let s = brownlab::matmodel::spectrum(&realize(OperatorTag::W1F12, &model), "W1F12", 3).unwrap();
    assert_eq!(io::spectrum_from_csv(&io::spectrum_csv(&s)).unwrap(), s.eigenvalues);
}
