use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::cantor::CantorSystem;
use crate::error::{Error, Result};
use crate::scalar::Exact;

/// Piecewise-affine staircase approximations `f_0, ..., f_n`, each stored as
/// its breakpoint list `(x, f(x))` in increasing `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseIterates<T> {
    levels: Vec<Vec<(T, T)>>,
    slopes: Vec<T>,
}

/// Builds `f_0(x) = x` and, recursively, `f_{m+1}` equal to `f_m(c)` on each
/// `J[m][i]` (with `c` the centre of `I[m][i]`) and affine on the two halves.
pub fn staircase_f<T: Exact>(system: &CantorSystem<T>, n: usize) -> Result<StaircaseIterates<T>> {
    if n > system.generations() {
        return Err(Error::Parameter(format!(
            "system has {} generations, {n} requested",
            system.generations()
        )));
    }
    let mut levels = vec![vec![(T::zero(), T::zero()), (T::one(), T::one())]];
    let mut slopes = vec![T::one()];
    for m in 0..n {
        let prev = &levels[m];
        let mut next = Vec::with_capacity(2 * prev.len());
        next.push(prev[0].clone());
        // On generation m the breakpoints come in pairs (a, b) bracketing each
        // I[m][i], separated by flat pieces over older gaps.
        let mut i = 0;
        for (k, w) in prev.windows(2).enumerate() {
            let ((xa, fa), (xb, fb)) = (&w[0], &w[1]);
            if fa == fb {
                next.push((xb.clone(), fb.clone()));
                continue;
            }
            let gap = &system.removed(m)[i];
            debug_assert!(
                system.retained(m)[i].a == *xa,
                "piece {k} is not I[{m}][{i}]"
            );
            let mid = (fa.clone() + fb.clone()) * T::half();
            next.push((gap.a.clone(), mid.clone()));
            next.push((gap.b.clone(), mid));
            next.push((xb.clone(), fb.clone()));
            i += 1;
        }
        slopes.push(slopes[m].clone() / (T::one() - system.alphas()[m].clone()));
        levels.push(next);
    }
    Ok(StaircaseIterates { levels, slopes })
}

impl<T: Exact> StaircaseIterates<T> {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn breakpoints(&self, n: usize) -> &[(T, T)] {
        &self.levels[n]
    }

    /// `l_n = prod_{k <= n} (1 - alpha_k)^{-1}`, the slope of `f_n` on `I[n][i]`.
    pub fn slope(&self, n: usize) -> T {
        self.slopes[n].clone()
    }

    /// `f_n(x)`, clamped to `0` left of `0` and `1` right of `1`.
    pub fn eval(&self, n: usize, x: &T) -> T {
        let pts = &self.levels[n];
        if x <= &pts[0].0 {
            return pts[0].1.clone();
        }
        let last = pts.len() - 1;
        if x >= &pts[last].0 {
            return pts[last].1.clone();
        }
        let k = pts.partition_point(|p| &p.0 <= x) - 1;
        let ((x0, f0), (x1, f1)) = (&pts[k], &pts[k + 1]);
        f0.clone()
            + (f1.clone() - f0.clone()) * (x.clone() - x0.clone()) / (x1.clone() - x0.clone())
    }
}

impl<T: Exact> Serialize for StaircaseIterates<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let levels: Vec<Vec<[String; 2]>> = self
            .levels
            .iter()
            .map(|l| {
                l.iter()
                    .map(|(x, f)| [x.to_exact_string(), f.to_exact_string()])
                    .collect()
            })
            .collect();
        let slopes: Vec<String> = self.slopes.iter().map(|v| v.to_exact_string()).collect();
        let mut st = s.serialize_struct("StaircaseIterates", 2)?;
        st.serialize_field("levels", &levels)?;
        st.serialize_field("slopes", &slopes)?;
        st.end()
    }
}
