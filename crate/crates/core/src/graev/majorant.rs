//! The dyadic non-Archimedean majorant of a pseudometric.
//!
//! Points are clustered at thresholds 2^(-k)/(n−1): two points get value
//! 2^(-m) where m is the deepest level at which they still share a
//! connected component of the threshold graph { d < 2^(-k)/(n−1) }. The
//! divisor n−1 caps path length, so a component of diameter-many edges
//! still sums below 2^(-k); that makes the result dominate d while taking
//! only the values {0} ∪ {2^(-k)} ∪ {1}.

use super::space::PseudometricSpace;
use super::GraevError;
use crate::rational::{pow2_inv, to_frac_string, Rat};
use num::{One, Zero};

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn components_below(space: &PseudometricSpace, threshold: &Rat) -> Dsu {
    let n = space.point_count();
    let mut dsu = Dsu::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if space.dist_by_index(i, j) < threshold {
                dsu.union(i, j);
            }
        }
    }
    dsu
}

/// Builds the ultrametric majorant table of a validated space with all
/// distances < 1 and at least two points. The output is a space over the
/// same points whose table dominates the input, satisfies the
/// non-Archimedean inequality, and takes only dyadic values.
pub fn nonarch_majorant(space: &PseudometricSpace) -> Result<PseudometricSpace, GraevError> {
    let n = space.point_count();
    if n < 2 {
        return Err(GraevError::TooFewPoints(n));
    }
    let ids = space.point_ids().to_vec();
    for i in 0..n {
        for j in i + 1..n {
            if space.dist_by_index(i, j) >= &Rat::one() {
                return Err(GraevError::NeedsNormalization {
                    x: space.name_of(ids[i]),
                    y: space.name_of(ids[j]),
                    value: to_frac_string(space.dist_by_index(i, j)),
                });
            }
        }
    }

    let scale = Rat::new(1.into(), (n as i64 - 1).into());
    // pairs joined by zero-distance paths stay together at every level
    let mut zero_dsu = Dsu::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if space.dist_by_index(i, j).is_zero() {
                zero_dsu.union(i, j);
            }
        }
    }

    // deepest level at which each non-zero pair is still joined
    let mut level: Vec<Vec<Option<u32>>> = vec![vec![None; n]; n];
    let min_positive = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| space.dist_by_index(i, j))
        .filter(|d| !d.is_zero())
        .min();
    if let Some(min_positive) = min_positive {
        let mut k: u32 = 0;
        loop {
            let threshold = pow2_inv(k) * &scale;
            let mut dsu = components_below(space, &threshold);
            let mut any_joined = false;
            for i in 0..n {
                for j in i + 1..n {
                    if zero_dsu.find(i) == zero_dsu.find(j) {
                        continue;
                    }
                    if dsu.find(i) == dsu.find(j) {
                        level[i][j] = Some(k);
                        any_joined = true;
                    }
                }
            }
            // once the threshold drops to the least positive distance only
            // zero edges remain and nothing changes at deeper levels
            if !any_joined || &threshold <= min_positive {
                break;
            }
            k += 1;
        }
    }

    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let value = if zero_dsu.find(i) == zero_dsu.find(j) {
                Rat::zero()
            } else {
                match level[i][j] {
                    Some(m) => pow2_inv(m),
                    None => Rat::one(),
                }
            };
            entries.push((ids[i], ids[j], value));
        }
    }
    let atoms: Vec<_> = space.atom_ids().collect();
    let names = ids
        .iter()
        .map(|a| (*a, space.name_of(*a)))
        .collect();
    Ok(
        PseudometricSpace::new(space.flavor(), atoms, space.basepoint(), &entries)?
            .with_names(names),
    )
}
