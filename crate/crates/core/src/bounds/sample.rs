//! Distribution families, Dirichlet sampling and simplex coordinate ascent
//! shared by the frontier search and the regime falsifier.

use rand::Rng;
use rand_distr::Exp1;

use crate::prob::{JointPmf, ProbError, Role};

/// Smallest coordinate-ascent step before stopping.
pub const ASCENT_TOL: f64 = 1e-7;

/// A point of a product of simplices.
pub type Param = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Family {
    /// One unrestricted simplex over every cell of the listed axes.
    Joint(Vec<(Role, usize)>),
    /// `p(u1) p(u2) p(v|u1,u2) p(x2|u2,v) p(x1|u1,u2,v)` over axes
    /// `U1, U2, V, X1, X2`.
    Bc {
        u1: usize,
        u2: usize,
        v: usize,
        x1: usize,
        x2: usize,
    },
}

impl Family {
    fn block_sizes(&self) -> Vec<usize> {
        match *self {
            Family::Joint(ref axes) => vec![axes.iter().map(|a| a.1).product()],
            Family::Bc { u1, u2, v, x1, x2 } => {
                let mut s = vec![u1, u2];
                s.extend(std::iter::repeat_n(v, u1 * u2));
                s.extend(std::iter::repeat_n(x2, u2 * v));
                s.extend(std::iter::repeat_n(x1, u1 * u2 * v));
                s
            }
        }
    }

    pub(crate) fn sample(&self, rng: &mut impl Rng) -> Param {
        self.block_sizes()
            .into_iter()
            .map(|n| dirichlet(rng, n))
            .collect()
    }

    pub(crate) fn build(&self, p: &Param) -> Result<JointPmf, ProbError> {
        match *self {
            Family::Joint(ref axes) => JointPmf::from_table(p[0].clone(), axes),
            Family::Bc { u1, u2, v, x1, x2 } => {
                let (pv, rest) = p[2..].split_at(u1 * u2);
                let (px2, px1) = rest.split_at(u2 * v);
                let axes = [
                    (Role::U1, u1),
                    (Role::U2, u2),
                    (Role::V, v),
                    (Role::X1, x1),
                    (Role::X2, x2),
                ];
                JointPmf::from_fn(&axes, |i| {
                    let (a, b, c) = (i[0], i[1], i[2]);
                    p[0][a]
                        * p[1][b]
                        * pv[a * u2 + b][c]
                        * px2[b * v + c][i[4]]
                        * px1[(a * u2 + b) * v + c][i[3]]
                })
            }
        }
    }

    /// Parameter of a joint-family PMF (its flattened values).
    pub(crate) fn param_of(pmf: &JointPmf) -> Param {
        vec![pmf.values().to_vec()]
    }
}

/// Flat Dirichlet draw via normalized unit exponentials.
pub(crate) fn dirichlet(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let s: f64 = e.iter().sum();
        if s > 0.0 {
            return e.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Cyclic coordinate ascent over every simplex coordinate. Each coordinate
/// tries moving mass towards and away from its vertex; the step halves after
/// a sweep with no improvement. Returns the best parameter and value.
pub(crate) fn ascend(
    start: Param,
    start_value: f64,
    max_evals: usize,
    mut objective: impl FnMut(&Param) -> Option<f64>,
) -> (Param, f64) {
    let mut best = start;
    let mut best_v = start_value;
    let mut step = 0.25;
    let mut evals = 0;
    while step >= ASCENT_TOL && evals < max_evals {
        let mut improved = false;
        for b in 0..best.len() {
            if best[b].len() < 2 {
                continue;
            }
            for i in 0..best[b].len() {
                for toward in [true, false] {
                    if evals >= max_evals {
                        return (best, best_v);
                    }
                    let Some(block) = moved(&best[b], i, step, toward) else {
                        continue;
                    };
                    let mut cand = best.clone();
                    cand[b] = block;
                    evals += 1;
                    if let Some(v) = objective(&cand) {
                        if v > best_v + 1e-12 {
                            best = cand;
                            best_v = v;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (best, best_v)
}

fn moved(p: &[f64], i: usize, s: f64, toward: bool) -> Option<Vec<f64>> {
    if toward {
        if p[i] >= 1.0 {
            return None;
        }
        let mut q: Vec<f64> = p.iter().map(|x| (1.0 - s) * x).collect();
        q[i] += s;
        Some(q)
    } else {
        if p[i] <= 0.0 || p[i] >= 1.0 {
            return None;
        }
        let cut = s * p[i];
        let norm = 1.0 - cut;
        let mut q: Vec<f64> = p.iter().map(|x| x / norm).collect();
        q[i] = (p[i] - cut) / norm;
        Some(q)
    }
}

/// Uniform laws on product supports `S1 × S2`. Falls back to singletons and
/// full alphabets when the full enumeration would exceed `cap`.
pub(crate) fn support_sweep(c1: usize, c2: usize, cap: usize) -> Vec<JointPmf> {
    let full = |c: usize| -> Vec<Vec<usize>> {
        (1u64..(1u64 << c))
            .map(|m| (0..c).filter(|&k| m >> k & 1 == 1).collect())
            .collect()
    };
    let reduced = |c: usize| -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = (0..c).map(|k| vec![k]).collect();
        if c > 1 {
            v.push((0..c).collect());
        }
        v
    };
    let small = c1 < 20 && c2 < 20 && ((1usize << c1) - 1) * ((1usize << c2) - 1) <= cap;
    let (s1, s2) = if small {
        (full(c1), full(c2))
    } else {
        (reduced(c1), reduced(c2))
    };
    let mut out = Vec::with_capacity(s1.len() * s2.len());
    for a in &s1 {
        for b in &s2 {
            let w = 1.0 / (a.len() * b.len()) as f64;
            let pmf = JointPmf::from_fn(&[(Role::X1, c1), (Role::X2, c2)], |i| {
                if a.contains(&i[0]) && b.contains(&i[1]) {
                    w
                } else {
                    0.0
                }
            })
            .expect("uniform on a non-empty support");
            out.push(pmf);
        }
    }
    out
}

/// Maps `f` over `items`, in parallel when the feature is on; the output keeps
/// input order.
pub(crate) fn map_ordered<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
