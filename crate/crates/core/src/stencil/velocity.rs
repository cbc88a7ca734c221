use serde::Serialize;

pub const DIM: usize = 3;
pub const Q: usize = 27;

/// Discrete velocities in lattice units (lambda = 1).
///
/// Index order is lexicographic in `(ex, ey, ez)` with each component running
/// `-1, 0, +1`, so `j = 9 (ex + 1) + 3 (ey + 1) + (ez + 1)`. The rest velocity
/// is `j = 13` and the opposite of `j` is `26 - j`. This order is part of the
/// public contract: matrix dumps and field files depend on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VelocitySet {
    velocities: Vec<[i32; DIM]>,
    opposite: Vec<usize>,
}

impl VelocitySet {
    /// Builds an arbitrary set; `opposite` is derived and must exist for every velocity.
    pub fn from_velocities(velocities: Vec<[i32; DIM]>) -> Option<Self> {
        let opposite = velocities
            .iter()
            .map(|v| {
                let neg = [-v[0], -v[1], -v[2]];
                velocities.iter().position(|w| *w == neg)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self { velocities, opposite })
    }

    pub fn dimension(&self) -> usize {
        DIM
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    pub fn velocities(&self) -> &[[i32; DIM]] {
        &self.velocities
    }

    pub fn velocity(&self, j: usize) -> [i32; DIM] {
        self.velocities[j]
    }

    pub fn opposite(&self, j: usize) -> usize {
        self.opposite[j]
    }

    pub fn index_of(&self, v: [i32; DIM]) -> Option<usize> {
        self.velocities.iter().position(|w| *w == v)
    }

    /// True when the set is exactly `{-1, 0, 1}^3` in the documented order.
    pub fn is_d3q27(&self) -> bool {
        self.velocities.len() == Q && self.velocities.iter().enumerate().all(|(j, v)| *v == lex_velocity(j))
    }
}

fn lex_velocity(j: usize) -> [i32; DIM] {
    [(j / 9) as i32 - 1, ((j / 3) % 3) as i32 - 1, (j % 3) as i32 - 1]
}

/// The 27 tensor-product velocities.
pub fn build_velocities() -> VelocitySet {
    let velocities: Vec<[i32; DIM]> = (0..Q).map(lex_velocity).collect();
    let opposite = (0..Q).map(|j| Q - 1 - j).collect();
    VelocitySet { velocities, opposite }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn tensor_product_each_once() {
        let vs = build_velocities();
        assert_eq!(vs.len(), 27);
        let set: HashSet<_> = vs.velocities().iter().copied().collect();
        assert_eq!(set.len(), 27);
        for ex in -1..=1 {
            for ey in -1..=1 {
                for ez in -1..=1 {
                    assert!(set.contains(&[ex, ey, ez]));
                }
            }
        }
        assert_eq!(vs.velocities().iter().filter(|v| **v == [0, 0, 0]).count(), 1);
        assert_eq!(vs.index_of([0, 0, 0]), Some(13));
        assert!(vs.is_d3q27());
    }

    #[test]
    fn opposite_is_an_involution() {
        let vs = build_velocities();
        for j in 0..vs.len() {
            let o = vs.opposite(j);
            assert_eq!(vs.opposite(o), j);
            let (v, w) = (vs.velocity(j), vs.velocity(o));
            assert_eq!([v[0] + w[0], v[1] + w[1], v[2] + w[2]], [0, 0, 0]);
        }
        let derived = VelocitySet::from_velocities(vs.velocities().to_vec()).unwrap();
        assert_eq!(derived, vs);
    }

    #[test]
    fn lattice_sums() {
        let vs = build_velocities();
        let v = vs.velocities();
        for a in 0..3 {
            assert_eq!(v.iter().map(|c| c[a]).sum::<i32>(), 0);
        }
        // brute force over the 27 triples
        let mut sx2 = 0;
        let mut sx2y2 = 0;
        for ex in -1i32..=1 {
            for ey in -1i32..=1 {
                for _ez in -1i32..=1 {
                    sx2 += ex * ex;
                    sx2y2 += ex * ex * ey * ey;
                }
            }
        }
        assert_eq!(sx2, 18);
        assert_eq!(sx2y2, 12);
        assert_eq!(v.iter().map(|c| c[0] * c[0]).sum::<i32>(), sx2);
        assert_eq!(v.iter().map(|c| c[0] * c[0] * c[1] * c[1]).sum::<i32>(), sx2y2);
    }
}
