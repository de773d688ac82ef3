//! Exact linear programs over small polytopes by vertex enumeration.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Ratio::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Ratio::from_integer(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub bound: Q,
    pub relation: Relation,
}

impl Constraint {
    fn lhs(&self, x: &[Q]) -> Q {
        self.coeffs.iter().zip(x).map(|(a, b)| *a * *b).sum()
    }

    pub fn satisfied(&self, x: &[Q]) -> bool {
        let l = self.lhs(x);
        match self.relation {
            Relation::Le => l <= self.bound,
            Relation::Eq => l == self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            constraints: Vec::new(),
        }
    }

    /// Adds `0 ≤ x_i ≤ 1` for every coordinate.
    pub fn with_unit_box(mut self) -> Self {
        for i in 0..self.dim {
            let mut e = vec![Q::zero(); self.dim];
            e[i] = -Q::one();
            self = self.le(e.clone(), Q::zero());
            e[i] = Q::one();
            self = self.le(e, Q::one());
        }
        self
    }

    pub fn le(mut self, coeffs: Vec<Q>, bound: Q) -> Self {
        self.push(coeffs, bound, Relation::Le);
        self
    }

    pub fn eq(mut self, coeffs: Vec<Q>, bound: Q) -> Self {
        self.push(coeffs, bound, Relation::Eq);
        self
    }

    pub fn push(&mut self, coeffs: Vec<Q>, bound: Q, relation: Relation) {
        assert_eq!(coeffs.len(), self.dim, "constraint arity");
        self.constraints.push(Constraint { coeffs, bound, relation });
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_feasible(&self, x: &[Q]) -> bool {
        self.constraints.iter().all(|c| c.satisfied(x))
    }

    /// Every feasible point that is the unique solution of `dim` constraints held with equality.
    pub fn vertices(&self) -> Vec<Vec<Q>> {
        let m = self.constraints.len();
        let mut out: Vec<Vec<Q>> = Vec::new();
        let mut subset: Vec<usize> = (0..self.dim).collect();
        if m < self.dim {
            return out;
        }
        loop {
            let rows: Vec<&Constraint> = subset.iter().map(|&i| &self.constraints[i]).collect();
            if let Some(x) = solve(&rows, self.dim) {
                if self.is_feasible(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
            if !next_combination(&mut subset, m) {
                break;
            }
        }
        out.sort();
        out
    }

    /// Maximum of `objective · x`; ties go to the lexicographically largest vertex.
    pub fn maximize(&self, objective: &[Q]) -> Option<(Q, Vec<Q>)> {
        let mut best: Option<(Q, Vec<Q>)> = None;
        for v in self.vertices() {
            let val: Q = objective.iter().zip(&v).map(|(a, b)| *a * *b).sum();
            let better = match &best {
                None => true,
                Some((b, arg)) => val > *b || (val == *b && v > *arg),
            };
            if better {
                best = Some((val, v));
            }
        }
        best
    }

    /// Maximizes each objective in turn, fixing earlier optima as equalities.
    pub fn maximize_sequentially(&self, objectives: &[Vec<Q>]) -> Option<(Vec<Q>, Vec<Q>)> {
        let mut set = self.clone();
        let mut optima = Vec::with_capacity(objectives.len());
        let mut arg = Vec::new();
        for obj in objectives {
            let (val, x) = set.maximize(obj)?;
            optima.push(val);
            arg = x;
            set = set.eq(obj.clone(), val);
        }
        Some((optima, arg))
    }
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Unique solution of the square system given by `rows` held with equality, if any.
fn solve(rows: &[&Constraint], dim: usize) -> Option<Vec<Q>> {
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut row = r.coeffs.clone();
            row.push(r.bound);
            row
        })
        .collect();
    for col in 0..dim {
        let pivot = (col..dim).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate().take(dim) {
            if r != col && !row[col].is_zero() {
                let f = row[col];
                for (x, y) in row[col..=dim].iter_mut().zip(&pivot[col..=dim]) {
                    *x -= f * *y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[dim]).collect())
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn display(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else if x.is_negative() {
        format!("-{}/{}", x.numer().abs(), x.denom())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_vertices() {
        let set = ConstraintSet::new(2).with_unit_box();
        assert_eq!(set.vertices().len(), 4);
        let (v, arg) = set.maximize(&[qi(1), qi(2)]).unwrap();
        assert_eq!(v, qi(3));
        assert_eq!(arg, vec![qi(1), qi(1)]);
    }

    #[test]
    fn cut_corner() {
        let set = ConstraintSet::new(2).with_unit_box().le(vec![qi(1), qi(1)], q(3, 2));
        let (v, _) = set.maximize(&[qi(1), qi(1)]).unwrap();
        assert_eq!(v, q(3, 2));
        assert_eq!(set.vertices().len(), 5);
    }

    #[test]
    fn ties_prefer_lexicographically_largest() {
        let set = ConstraintSet::new(2).with_unit_box();
        let (_, arg) = set.maximize(&[qi(0), qi(1)]).unwrap();
        assert_eq!(arg, vec![qi(1), qi(1)]);
    }
}
