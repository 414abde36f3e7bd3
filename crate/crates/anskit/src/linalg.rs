//! Row-echelon bases over ℚ, used for span maintenance during kernel and
//! equivalence computations.

use num_rational::BigRational;
use num_traits::Zero;

/// An incrementally maintained reduced basis of a ℚ-vector subspace.
#[derive(Debug, Clone, Default)]
pub(crate) struct RationalBasis {
    /// Rows normalized to a leading 1 at their pivot column.
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl RationalBasis {
    pub fn new() -> RationalBasis {
        RationalBasis::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place.
    pub fn reduce(&self, v: &mut [BigRational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &c * r;
                }
            }
        }
    }

    /// Inserts `v` if it is independent of the current span. Returns true
    /// when the vector enlarged the basis.
    pub fn insert(&mut self, mut v: Vec<BigRational>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = v[p].clone();
        for x in v.iter_mut() {
            *x /= &lead;
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// True when `v` lies in the span.
    #[allow(dead_code)]
    pub fn contains(&self, v: &[BigRational]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }
}
