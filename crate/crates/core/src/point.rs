use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub type Coords = SmallVec<[i64; 8]>;

/// Integer coordinates of a lattice point in the lattice basis.
/// Ordering is lexicographic on the coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Coords);

impl LatticePoint {
    pub fn zero(dim: usize) -> Self {
        LatticePoint(SmallVec::from_elem(0, dim))
    }

    pub fn new(coords: &[i64]) -> Self {
        LatticePoint(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticePoint(self.0.iter().map(|c| c * k).collect())
    }

    /// The lexicographically larger of `self` and `-self`.
    pub fn sign_canonical(&self) -> Self {
        let n = -self;
        if n > *self {
            n
        } else {
            self.clone()
        }
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<&[i64]> for LatticePoint {
    fn from(c: &[i64]) -> Self {
        LatticePoint::new(c)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(c: Vec<i64>) -> Self {
        LatticePoint(SmallVec::from_vec(c))
    }
}

impl Add for &LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: LatticePoint) -> LatticePoint {
        &self + &rhs
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: LatticePoint) -> LatticePoint {
        &self - &rhs
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        -&self
    }
}
