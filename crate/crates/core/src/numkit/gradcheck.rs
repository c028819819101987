/// Outcome of comparing an analytic gradient with central differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

impl GradCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error < tol
    }
}

/// Absolute floor in the relative-error denominator; gradient entries
/// smaller than this are compared in absolute terms.
const REL_FLOOR: f64 = 1e-6;

/// Checks `f`'s analytic gradient at `x` against central finite differences.
///
/// `f` returns `(value, gradient)`; the error per coordinate is
/// `|a − n| / max(|a|, |n|, 1e-6)` and the worst coordinate is reported.
pub fn grad_check<F>(mut f: F, x: &[f64], step: f64) -> GradCheck
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    assert!(step > 0.0, "finite-difference step must be positive");
    let (_, analytic) = f(x);
    assert_eq!(analytic.len(), x.len(), "gradient length mismatch");
    let mut probe = x.to_vec();
    let mut report = GradCheck {
        max_rel_error: 0.0,
        worst_index: 0,
        analytic: 0.0,
        numeric: 0.0,
    };
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let (up, _) = f(&probe);
        probe[i] = x[i] - step;
        let (down, _) = f(&probe);
        probe[i] = x[i];
        let numeric = (up - down) / (2.0 * step);
        let a = analytic[i];
        let denom = a.abs().max(numeric.abs()).max(REL_FLOOR);
        let err = (a - numeric).abs() / denom;
        if !(err <= report.max_rel_error) {
            report = GradCheck {
                max_rel_error: if err.is_nan() { f64::INFINITY } else { err },
                worst_index: i,
                analytic: a,
                numeric,
            };
        }
    }
    report
}
