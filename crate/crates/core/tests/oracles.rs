mod support;

use support::*;

#[test]
fn maximal_operators_match_enumeration() {
    for (name, d) in maximal_discrepancies() {
        assert!(d <= 1e-12, "{name}: {d}");
    }
}

#[test]
fn weight_constants_match_enumeration() {
    for (name, d) in weight_discrepancies() {
        assert!(d <= 1e-12, "{name}: {d}");
    }
}

#[test]
fn bilinear_closed_form_at_origin() {
    assert!(bilinear_origin_error(256) <= 0.02);
    assert!(bilinear_origin_error(1024) <= 0.005);
}

#[test]
fn riesz_closed_form() {
    let (coarse, fine) = (riesz_error(256), riesz_error(1024));
    assert!(coarse <= 0.02 && fine <= 0.005, "{coarse} {fine}");
    assert!(fine < coarse);
}
