use num_complex::Complex64;

use crate::lti::{log_grid, TransferFunction};

/// Classical robustness measures of a loop transfer function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopMeasures {
    /// Smallest gain margin over all phase crossovers (linear), `inf` if none.
    pub gain_margin: f64,
    /// Smallest phase margin over all gain crossovers (deg), `inf` if none.
    pub phase_margin_deg: f64,
    /// Peak sensitivity `max |1 / (1 + L)|`.
    pub ms: f64,
}

const SEARCH_LO: f64 = 1e-4;
const SEARCH_HI: f64 = 1e6;
const SEARCH_POINTS: usize = 4000;

pub fn loop_measures(loop_tf: &TransferFunction) -> LoopMeasures {
    let omega = log_grid(SEARCH_LO, SEARCH_HI, SEARCH_POINTS).expect("fixed grid");
    let at = |w: f64| loop_tf.eval(Complex64::new(0.0, w));
    let values: Vec<Complex64> = omega.iter().map(|&w| at(w)).collect();
    let phase = crate::lti::unwrapped_phase_deg(&values);

    // Continuous phase at an off-grid frequency, on the branch of a nearby sample.
    let phase_near = |w: f64, reference: f64| -> f64 {
        let raw = at(w).arg().to_degrees();
        raw + 360.0 * ((reference - raw) / 360.0).round()
    };

    let mut phase_margin = f64::INFINITY;
    let mut gain_margin = f64::INFINITY;
    for i in 0..omega.len() - 1 {
        let (m0, m1) = (values[i].norm(), values[i + 1].norm());
        if (m0 - 1.0) * (m1 - 1.0) <= 0.0 && m0 != m1 {
            let wc = bisect(omega[i], omega[i + 1], |w| at(w).norm() - 1.0);
            let pm = 180.0 + phase_near(wc, phase[i]);
            if pm.abs() < phase_margin.abs() {
                phase_margin = pm;
            }
        }
        // crossings of -180 - 360 k
        let k0 = ((phase[i] + 180.0) / 360.0).floor();
        let k1 = ((phase[i + 1] + 180.0) / 360.0).floor();
        if k0 != k1 {
            let level = 360.0 * k0.max(k1) - 180.0;
            let wp = bisect(omega[i], omega[i + 1], |w| phase_near(w, phase[i]) - level);
            let gm = 1.0 / at(wp).norm();
            if gm < gain_margin {
                gain_margin = gm;
            }
        }
    }

    let sens = |w: f64| 1.0 / (1.0 + at(w)).norm();
    let (imax, _) = omega
        .iter()
        .enumerate()
        .map(|(i, &w)| (i, sens(w)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let lo = omega[imax.saturating_sub(1)];
    let hi = omega[(imax + 1).min(omega.len() - 1)];
    let ms = golden_max(lo, hi, sens);

    LoopMeasures {
        gain_margin,
        phase_margin_deg: phase_margin,
        ms,
    }
}

/// Root of `f` between `lo` and `hi`, bisecting in log frequency.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    (lo * hi).sqrt()
}

fn golden_max(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let g = |x: f64| f(x.exp());
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    for _ in 0..200 {
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    g(0.5 * (a + b)).max(f(lo)).max(f(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrator_loop() {
        // L = 1/s: crossover at 1 rad/s with 90 deg margin, no phase crossover
        let m = loop_measures(&TransferFunction::integrator());
        assert!((m.phase_margin_deg - 90.0).abs() < 1e-9);
        assert!(m.gain_margin.is_infinite());
        // |1/(1 + 1/s)| = |s/(s+1)| -> 1 from below
        assert!((m.ms - 1.0).abs() < 1e-6);
    }

    #[test]
    fn third_order_lag() {
        // L = k/(s+1)^3: phase crossover at sqrt(3), |L| there = k/8
        let k = 4.0;
        let l = TransferFunction::from_coeffs(&[k], &[1.0, 3.0, 3.0, 1.0]).unwrap();
        let m = loop_measures(&l);
        assert!((m.gain_margin - 2.0).abs() < 1e-9, "{}", m.gain_margin);
        // gain crossover: (1 + w^2)^{3/2} = 4
        let wc = (4f64.powf(2.0 / 3.0) - 1.0).sqrt();
        let pm = 180.0 - 3.0 * wc.atan().to_degrees();
        assert!((m.phase_margin_deg - pm).abs() < 1e-7);
        assert!(m.ms > 1.0);
    }
}
