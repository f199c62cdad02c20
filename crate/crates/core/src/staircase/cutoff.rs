use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Smooth even cutoff: `1` on `[-1, 1]`, `0` outside `(-outer, outer)`, with
/// the transition given by the exponential smoothstep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub outer: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Self { outer: 1.95 }
    }
}

fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

const SECOND_STEP: f64 = 1e-4;

impl Cutoff {
    pub fn new(outer: f64) -> Self {
        assert!(
            outer > 1.0 && outer < 2.0,
            "cutoff support must end in (1, 2)"
        );
        Self { outer }
    }

    pub fn value(&self, t: f64) -> f64 {
        1.0 - smoothstep((t.abs() - 1.0) / (self.outer - 1.0))
    }

    /// Second derivative by a central difference; the profile is `C^infinity`.
    pub fn second(&self, t: f64) -> f64 {
        let a = t.abs();
        if a <= 1.0 - SECOND_STEP || a >= self.outer + SECOND_STEP {
            return 0.0;
        }
        let h = SECOND_STEP;
        (self.value(t + h) - 2.0 * self.value(t) + self.value(t - h)) / (h * h)
    }

    /// `sup |chi''|`, sampled on the transition region.
    pub fn sup_second(&self) -> f64 {
        if *self == Cutoff::default() {
            static DEFAULT: OnceLock<f64> = OnceLock::new();
            return *DEFAULT.get_or_init(|| Cutoff::default().sample_sup());
        }
        self.sample_sup()
    }

    fn sample_sup(&self) -> f64 {
        let n = 200_000;
        let w = self.outer - 1.0;
        (0..=n)
            .map(|k| self.second(1.0 + w * k as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let c = Cutoff::default();
        assert_eq!(c.value(0.3), 1.0);
        assert_eq!(c.value(-1.0), 1.0);
        assert_eq!(c.value(1.95), 0.0);
        assert_eq!(c.value(-2.5), 0.0);
        assert!((c.value(1.475) - 0.5).abs() < 1e-15);
        assert_eq!(c.value(1.3), c.value(-1.3));
        for k in 0..100 {
            let t = -2.0 + 0.04 * k as f64;
            assert!((0.0..=1.0).contains(&c.value(t)));
        }
    }

    #[test]
    fn second_derivative_bound_scales_with_transition_length() {
        let c = Cutoff::default();
        let s = c.sup_second();
        assert!(s > 5.0 && s < 20.0, "{s}");
        let wide = Cutoff::new(1.5).sup_second();
        // halving the transition length multiplies chi'' by 4 (up to the 0.95 vs 0.5 ratio)
        assert!((wide / s - (0.95f64 / 0.5).powi(2)).abs() < 1e-3);
    }
}
