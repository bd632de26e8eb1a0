use crate::scalar::Scalar;

/// One-dimensional minimizer for the runtime exponent as a function of δ.
///
/// The feasible set is `δ ≥ 1 + q`. A log-spaced scan of `δ − 1` over
/// `[q, span·q]` brackets the minimum (and guards against the objective not
/// being unimodal), then golden-section search narrows the bracket. If the
/// scan minimum sits on the upper end the span grows tenfold and the scan is
/// repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSearch {
    pub scan_points: usize,
    pub span: f64,
    pub tolerance: f64,
    pub max_extensions: usize,
}

impl Default for DeltaSearch {
    fn default() -> Self {
        DeltaSearch {
            scan_points: 4096,
            span: 1e6,
            tolerance: 1e-12,
            max_extensions: 8,
        }
    }
}

impl DeltaSearch {
    /// Same search with `factor`× as many scan points.
    pub fn refined(&self, factor: usize) -> Self {
        DeltaSearch {
            scan_points: self.scan_points * factor,
            ..self.clone()
        }
    }

    /// Returns `(δ*, g(δ*))`. `q` must be positive.
    pub fn minimize<F: Scalar>(&self, q: F, g: impl Fn(F) -> F) -> (F, F) {
        debug_assert!(q > F::zero());
        let points = self.scan_points.max(3);
        let mut span = F::lit(self.span);
        let mut extensions = 0;
        let (lo, hi, mut best) = loop {
            let log_lo = q.ln();
            let log_hi = (q * span).ln();
            let step = (log_hi - log_lo) / F::of_usize(points - 1);
            let offset = |i: usize| (log_lo + step * F::of_usize(i)).exp();
            let mut arg = 0;
            let mut val = F::infinity();
            for i in 0..points {
                let d = F::one() + offset(i);
                let v = g(d);
                if v < val {
                    val = v;
                    arg = i;
                }
            }
            if arg == points - 1 && extensions < self.max_extensions {
                span = span * F::lit(10.0);
                extensions += 1;
                continue;
            }
            let lo = F::one() + if arg == 0 { q } else { offset(arg - 1) };
            let hi = F::one() + offset((arg + 1).min(points - 1));
            break (lo, hi, (F::one() + offset(arg), val));
        };

        let refined = golden_section(&g, lo, hi, F::lit(self.tolerance));
        if refined.1 <= best.1 {
            best = refined;
        }
        best
    }
}

fn golden_section<F: Scalar>(g: &impl Fn(F) -> F, mut a: F, mut b: F, tol: F) -> (F, F) {
    let inv_phi = (F::lit(5.0).sqrt() - F::one()) / F::lit(2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..500 {
        let floor = F::epsilon() * F::lit(4.0) * b.abs().max(F::one());
        if b - a <= tol.max(floor) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - (b - a) * inv_phi;
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + (b - a) * inv_phi;
            gd = g(d);
        }
    }
    if gc < gd {
        (c, gc)
    } else {
        (d, gd)
    }
}
