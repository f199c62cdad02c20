use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Exact};

/// Closed interval `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    pub a: T,
    pub b: T,
}

impl<T: Exact> Interval<T> {
    pub fn length(&self) -> T {
        self.b.clone() - self.a.clone()
    }

    pub fn centre(&self) -> T {
        (self.a.clone() + self.b.clone()) * T::half()
    }

    pub fn contains(&self, x: &T) -> bool {
        &self.a <= x && x <= &self.b
    }
}

impl<T: Exact> Serialize for Interval<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.to_exact_string(), self.b.to_exact_string()].serialize(s)
    }
}

/// Nested intervals `I[n][i]` and removed middle intervals `J[n][i]`.
///
/// `I[0] = [[0, 1]]`; `J[n][i]` is the closed interval of length
/// `alpha_{n+1} |I[n][i]|` centred in `I[n][i]`, and `I[n+1][2i]`,
/// `I[n+1][2i+1]` (zero-based) are the two components of `I[n][i]` minus the
/// interior of `J[n][i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSystem<T> {
    alphas: Vec<T>,
    retained: Vec<Vec<Interval<T>>>,
    removed: Vec<Vec<Interval<T>>>,
}

/// `alpha_k = alpha1 4^{-(k-1)}`, `k = 1..=n`.
pub fn default_alphas<T: Exact>(alpha1: T, n: usize) -> Vec<T> {
    let quarter = T::from_ratio(1, 4);
    let mut out = Vec::with_capacity(n);
    let mut a = alpha1;
    for _ in 0..n {
        out.push(a.clone());
        a = a * quarter.clone();
    }
    out
}

/// Builds the interval tree to generation `n` from `alphas[0..n]`.
pub fn build_cantor<T: Exact>(alphas: &[T], n: usize) -> Result<CantorSystem<T>> {
    if n == 0 {
        return Err(Error::Parameter("need at least one generation".into()));
    }
    if alphas.len() < n {
        return Err(Error::Parameter(format!(
            "{} ratios given for {n} generations",
            alphas.len()
        )));
    }
    let alphas = alphas[..n].to_vec();
    for (k, a) in alphas.iter().enumerate() {
        if !(a > &T::zero() && a < &T::one()) {
            return Err(Error::Parameter(format!(
                "alpha_{} = {:?} is not in (0, 1)",
                k + 1,
                a
            )));
        }
        if k > 0 && !(a < &alphas[k - 1]) {
            return Err(Error::Parameter(format!(
                "alpha_{} does not decrease",
                k + 1
            )));
        }
    }
    let mut retained = vec![vec![Interval {
        a: T::zero(),
        b: T::one(),
    }]];
    let mut removed = Vec::with_capacity(n);
    for alpha in &alphas {
        let prev = retained.last().expect("generation 0 exists");
        let mut gaps = Vec::with_capacity(prev.len());
        let mut next = Vec::with_capacity(2 * prev.len());
        for iv in prev {
            let half_gap = alpha.clone() * iv.length() * T::half();
            let c = iv.centre();
            let j = Interval {
                a: c.clone() - half_gap.clone(),
                b: c + half_gap,
            };
            next.push(Interval {
                a: iv.a.clone(),
                b: j.a.clone(),
            });
            next.push(Interval {
                a: j.b.clone(),
                b: iv.b.clone(),
            });
            gaps.push(j);
        }
        removed.push(gaps);
        retained.push(next);
    }
    Ok(CantorSystem {
        alphas,
        retained,
        removed,
    })
}

impl<T: Exact> CantorSystem<T> {
    pub fn generations(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    /// `I[n]`, `0 <= n <= N`.
    pub fn retained(&self, n: usize) -> &[Interval<T>] {
        &self.retained[n]
    }

    /// `J[n]`, `0 <= n < N`.
    pub fn removed(&self, n: usize) -> &[Interval<T>] {
        &self.removed[n]
    }

    /// `prod_{k <= n} (1 - alpha_k)`.
    pub fn product(&self, n: usize) -> T {
        self.alphas[..n]
            .iter()
            .fold(T::one(), |p, a| p * (T::one() - a.clone()))
    }

    /// `2^{-n} prod_{k <= n} (1 - alpha_k)`, the common length of the `I[n][i]`.
    pub fn expected_length(&self, n: usize) -> T {
        let mut two_pow = T::one();
        for _ in 0..n {
            two_pow = two_pow * T::from_ratio(2, 1);
        }
        self.product(n) / two_pow
    }

    /// Measure of `I[N]`, an upper estimate for the limit set.
    pub fn measure_estimate(&self) -> T {
        self.product(self.generations())
    }

    /// Distance from `x` to the union of `I[N]` (zero inside), in `f64`.
    pub fn distance_to_retained(&self, x: f64) -> f64 {
        let last = &self.retained[self.generations()];
        let k = last.partition_point(|iv| to_f64(iv.b.clone()) < x);
        let mut best = f64::INFINITY;
        for j in [k.wrapping_sub(1), k] {
            if let Some(iv) = last.get(j) {
                let (a, b) = (to_f64(iv.a.clone()), to_f64(iv.b.clone()));
                let d = if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                };
                best = best.min(d);
            }
        }
        best
    }

    pub fn to_f64(&self) -> CantorSystem<f64> {
        let conv = |v: &Vec<Vec<Interval<T>>>| {
            v.iter()
                .map(|g| {
                    g.iter()
                        .map(|iv| Interval {
                            a: to_f64(iv.a.clone()),
                            b: to_f64(iv.b.clone()),
                        })
                        .collect()
                })
                .collect()
        };
        CantorSystem {
            alphas: self.alphas.iter().map(|a| to_f64(a.clone())).collect(),
            retained: conv(&self.retained),
            removed: conv(&self.removed),
        }
    }
}

impl<T: Exact> Serialize for CantorSystem<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CantorSystem", 4)?;
        let alphas: Vec<String> = self.alphas.iter().map(|a| a.to_exact_string()).collect();
        st.serialize_field("alphas", &alphas)?;
        st.serialize_field("retained", &self.retained)?;
        st.serialize_field("removed", &self.removed)?;
        st.serialize_field(
            "measure_estimate",
            &self.measure_estimate().to_exact_string(),
        )?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn first_generation_for_one_half() {
        let c = build_cantor(&default_alphas(q(1, 2), 3), 3).unwrap();
        assert_eq!(
            c.retained(1)[0],
            Interval {
                a: q(0, 1),
                b: q(1, 4)
            }
        );
        assert_eq!(
            c.retained(1)[1],
            Interval {
                a: q(3, 4),
                b: q(1, 1)
            }
        );
        assert_eq!(
            c.removed(0)[0],
            Interval {
                a: q(1, 4),
                b: q(3, 4)
            }
        );
    }

    #[test]
    fn lengths_are_exactly_homogeneous() {
        let c = build_cantor(&default_alphas(q(99, 100), 10), 10).unwrap();
        for n in 0..=10 {
            let expected = c.expected_length(n);
            assert!(c.retained(n).iter().all(|iv| iv.length() == expected));
            assert_eq!(c.retained(n).len(), 1 << n);
        }
    }

    #[test]
    fn product_of_quarter_powers() {
        let alphas: Vec<f64> = (1..=8).map(|k| 4f64.powi(-k)).collect();
        let c = build_cantor(&alphas, 8).unwrap();
        let direct: f64 = alphas.iter().map(|a| 1.0 - a).product();
        assert!((c.measure_estimate() - direct).abs() < 1e-15);
        assert!((direct - 0.688_541_039_217_603).abs() < 1e-12);
    }

    #[test]
    fn gaps_nest_strictly() {
        let c = build_cantor(&default_alphas(q(1, 2), 4), 4).unwrap();
        for n in 0..4 {
            for (i, j) in c.removed(n).iter().enumerate() {
                let iv = &c.retained(n)[i];
                assert!(iv.a < j.a && j.b < iv.b);
                assert_eq!(c.retained(n + 1)[2 * i].b, j.a);
                assert_eq!(c.retained(n + 1)[2 * i + 1].a, j.b);
            }
        }
    }

    #[test]
    fn invalid_ratios() {
        assert!(build_cantor(&[0.5, 0.6], 2).is_err());
        assert!(build_cantor(&[1.0], 1).is_err());
        assert!(build_cantor(&[0.5], 2).is_err());
    }

    #[test]
    fn json_uses_dyadic_strings() {
        let c = build_cantor(&default_alphas(q(1, 2), 1), 1).unwrap();
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j["retained"][1][0], serde_json::json!(["0", "1/4"]));
        assert_eq!(j["measure_estimate"], serde_json::json!("1/2"));
    }

    #[test]
    fn distance_to_last_generation() {
        let c = build_cantor(&[0.5], 1).unwrap();
        assert_eq!(c.distance_to_retained(0.5), 0.25);
        assert_eq!(c.distance_to_retained(0.1), 0.0);
        assert_eq!(c.distance_to_retained(-0.2), 0.2);
    }
}
