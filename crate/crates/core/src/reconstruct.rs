//! Rebuilding differential operators from data.
//!
//! * [`reconstruct_operator`] recovers `E` from its values on the monomial
//!   grid `t^i`, `i in {0..n}^k`, by Newton forward differences in the
//!   falling-factorial basis of the exponent variables.
//! * [`fit_operator`] finds an operator of degree `<= n` agreeing with a
//!   finite table, by elimination over `K`.
//! * [`check_recurrence`] verifies a linear recurrence on a sequence.
//!
//! Grid data alone cannot show that the underlying map is additive; the
//! reconstructed operator equals the map everywhere only when the map is
//! known to be additive of order `<= n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::deriv::DiffOp;
use crate::error::{check_dims, Error, Result};
use crate::exactnum::{Monomial, MultiIndex, RatFunc};
use crate::leibniz::{MapTable, PointMap};
use crate::linalg::{self, Solution};
use crate::sample::monomials_up_to;

/// Values on the exponent grid `{0..n}^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridValues {
    pub nvars: usize,
    pub n: u32,
    pub values: BTreeMap<Monomial, RatFunc>,
}

/// Every exponent vector in `{0..n}^k`, first variable varying slowest.
pub fn grid_points(nvars: usize, n: u32) -> Vec<Monomial> {
    let side = n as usize + 1;
    let total = side.pow(nvars as u32);
    (0..total)
        .map(|mut code| {
            let mut e = vec![0u32; nvars];
            for slot in e.iter_mut().rev() {
                *slot = (code % side) as u32;
                code /= side;
            }
            Monomial::new(e)
        })
        .collect()
}

impl GridValues {
    pub fn new(nvars: usize, n: u32, values: BTreeMap<Monomial, RatFunc>) -> Self {
        GridValues { nvars, n, values }
    }

    /// `D(t^i)` for every `i` in the grid.
    pub fn tabulate<M: PointMap + ?Sized>(map: &M, n: u32) -> Result<Self> {
        let nvars = map.nvars();
        let mut values = BTreeMap::new();
        for i in grid_points(nvars, n) {
            let v = map.eval(&RatFunc::monomial(&i))?;
            values.insert(i, v);
        }
        Ok(GridValues { nvars, n, values })
    }

    fn check_complete(&self) -> Result<()> {
        for i in grid_points(self.nvars, self.n) {
            match self.values.get(&i) {
                Some(v) => check_dims(self.nvars, v.nvars())?,
                None => return Err(Error::IncompleteGrid(i.exponents().to_vec())),
            }
        }
        Ok(())
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Coefficients `c_j` of `p(i) = sum_j c_j * i1^[j1] ... ik^[jk]` from the
/// values of `p` on `{0..n}^k`:
/// `c_j = (Delta_1^j1 ... Delta_k^jk p)(0) / (j1! ... jk!)` with unit
/// forward differences in each exponent.
pub fn newton_coeffs(p: &GridValues) -> Result<BTreeMap<MultiIndex, RatFunc>> {
    p.check_complete()?;
    let k = p.nvars;
    let side = p.n as usize + 1;
    let points = grid_points(k, p.n);
    let mut table: Vec<RatFunc> = points.iter().map(|i| p.values[i].clone()).collect();

    // Row-major layout: the stride of variable v is side^(k-1-v).
    for v in 0..k {
        let stride = side.pow((k - 1 - v) as u32);
        for base in 0..table.len() {
            if !(base / stride).is_multiple_of(side) {
                continue;
            }
            for level in 1..side {
                for pos in (level..side).rev() {
                    let hi = base + pos * stride;
                    let lo = hi - stride;
                    table[hi] = &table[hi] - &table[lo];
                }
            }
        }
    }

    let mut out = BTreeMap::new();
    for (j, v) in points.into_iter().zip(table) {
        let denom: BigInt = j.exponents().iter().map(|&e| factorial(e)).product();
        let c = v.scale(&BigRational::new(BigInt::one(), denom));
        out.insert(j, c);
    }
    Ok(out)
}

/// Evaluate `sum_j c_j * prod_m i_m^[j_m]` at an integer exponent vector.
pub fn eval_falling_factorial_sum(coeffs: &BTreeMap<MultiIndex, RatFunc>, i: &[u32]) -> RatFunc {
    let nvars = i.len();
    let mut acc = RatFunc::zero(nvars);
    for (j, c) in coeffs {
        let w: BigInt = j
            .exponents()
            .iter()
            .zip(i)
            .map(|(&jm, &im)| {
                (0..jm).fold(BigInt::one(), |a, r| a * (BigInt::from(im) - BigInt::from(r)))
            })
            .product();
        acc = &acc + &c.scale(&BigRational::from_integer(w));
    }
    acc
}

/// Rebuild `E = sum_j c_j t^j d^j` from grid values `D(t^i)`.
///
/// Fails with [`Error::DegreeOverflow`] when some `c_j` with `|j| > n` is
/// nonzero, i.e. when the data is not that of an operator of degree `<= n`.
pub fn reconstruct_operator(g: &GridValues) -> Result<DiffOp> {
    g.check_complete()?;
    let p_values = g
        .values
        .iter()
        .map(|(i, v)| (i.clone(), v * &RatFunc::inverse_monomial(i)))
        .collect();
    let coeffs = newton_coeffs(&GridValues::new(g.nvars, g.n, p_values))?;
    let mut terms = Vec::new();
    for (j, c) in coeffs {
        if c.is_zero() {
            continue;
        }
        if j.total_degree() > g.n {
            return Err(Error::DegreeOverflow {
                index: j.exponents().to_vec(),
                bound: g.n as usize,
            });
        }
        let coeff = &c * &RatFunc::monomial(&j);
        terms.push((j, coeff));
    }
    Ok(DiffOp::from_terms(g.nvars, terms))
}

/// Result of [`fit_operator`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fit {
    /// An agreeing operator (free coefficients zeroed) and the dimension of
    /// the space of agreeing operators.
    Solved { operator: DiffOp, nullity: usize },
    /// No operator of the requested shape agrees with the table; `element`
    /// is the table entry whose equation became inconsistent.
    Infeasible { row: usize, element: RatFunc },
}

impl Fit {
    pub fn operator(&self) -> Option<&DiffOp> {
        match self {
            Fit::Solved { operator, .. } => Some(operator),
            Fit::Infeasible { .. } => None,
        }
    }
}

/// Find `E = sum_{|alpha| <= n} c_alpha d^alpha` with `E(x) = D(x)` for every
/// table entry, solving for the `c_alpha` in `K`. With `require_o0` the
/// identity term is excluded.
pub fn fit_operator(table: &MapTable, n: u32, require_o0: bool) -> Result<Fit> {
    let nvars = PointMap::nvars(table);
    let unknowns: Vec<MultiIndex> = monomials_up_to(nvars, n)
        .into_iter()
        .filter(|a| !(require_o0 && a.is_one()))
        .collect();
    let mut rows = Vec::with_capacity(table.len());
    let mut rhs = Vec::with_capacity(table.len());
    for (x, v) in table.entries() {
        let mut cache = std::collections::HashMap::new();
        rows.push(
            unknowns
                .iter()
                .map(|a| crate::deriv::partial_derivative(x, a, &mut cache))
                .collect(),
        );
        rhs.push(v.clone());
    }
    Ok(match linalg::solve(rows, rhs, unknowns.len(), nvars) {
        Solution::Solved { values, nullity } => Fit::Solved {
            operator: DiffOp::from_terms(nvars, unknowns.into_iter().zip(values)),
            nullity,
        },
        Solution::Inconsistent { row } => Fit::Infeasible {
            row,
            element: table.entries()[row].0.clone(),
        },
    })
}

/// `c_N a_n + ... + c_0 a_{n-N} = 0` for all `n >= N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    coeffs: Vec<RatFunc>,
    seq: Vec<RatFunc>,
}

impl RecurrenceSpec {
    /// `coeffs = [c_0, ..., c_N]` with `c_N != 0`; the sequence needs at
    /// least `N + 1` terms.
    pub fn new(coeffs: Vec<RatFunc>, seq: Vec<RatFunc>) -> Result<Self> {
        let Some(last) = coeffs.last() else {
            return Err(Error::InvalidRecurrence("no coefficients".into()));
        };
        if last.is_zero() {
            return Err(Error::InvalidRecurrence("leading coefficient is zero".into()));
        }
        if seq.len() < coeffs.len() {
            return Err(Error::InvalidRecurrence(format!(
                "sequence has {} terms, order {} needs at least {}",
                seq.len(),
                coeffs.len() - 1,
                coeffs.len()
            )));
        }
        let nvars = last.nvars();
        for x in coeffs.iter().chain(&seq) {
            check_dims(nvars, x.nvars())?;
        }
        Ok(RecurrenceSpec { coeffs, seq })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrenceCheck {
    Pass,
    /// First index `n` at which the relation fails.
    FailAt(usize),
}

impl fmt::Display for RecurrenceCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecurrenceCheck::Pass => f.write_str("pass"),
            RecurrenceCheck::FailAt(n) => write!(f, "fail at index {n}"),
        }
    }
}

pub fn check_recurrence(spec: &RecurrenceSpec) -> RecurrenceCheck {
    let big_n = spec.order();
    for n in big_n..spec.seq.len() {
        let window = &spec.seq[n - big_n..=n];
        let mut acc = RatFunc::zero(spec.coeffs[0].nvars());
        for (c, a) in spec.coeffs.iter().zip(window) {
            acc = &acc + &(c * a);
        }
        if !acc.is_zero() {
            return RecurrenceCheck::FailAt(n);
        }
    }
    RecurrenceCheck::Pass
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: usize, c: i64) -> RatFunc {
        RatFunc::from_int(n, c)
    }
    fn idx(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }
    fn grid(nvars: usize, n: u32, f: impl Fn(&[u32]) -> RatFunc) -> GridValues {
        let values = grid_points(nvars, n)
            .into_iter()
            .map(|i| {
                let v = f(i.exponents());
                (i, v)
            })
            .collect();
        GridValues::new(nvars, n, values)
    }

    #[test]
    fn newton_squares() {
        let c = newton_coeffs(&grid(1, 2, |i| int(1, (i[0] * i[0]) as i64))).unwrap();
        assert_eq!(c[&idx(&[0])], int(1, 0));
        assert_eq!(c[&idx(&[1])], int(1, 1));
        assert_eq!(c[&idx(&[2])], int(1, 1));
    }

    #[test]
    fn newton_constant() {
        let c = newton_coeffs(&grid(1, 3, |_| int(1, 5))).unwrap();
        assert_eq!(c[&idx(&[0])], int(1, 5));
        assert!(c.iter().filter(|(j, _)| !j.is_one()).all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn newton_bilinear() {
        let c = newton_coeffs(&grid(2, 1, |i| int(2, (i[0] * i[1]) as i64))).unwrap();
        for (j, v) in &c {
            let expect = if *j == idx(&[1, 1]) { 1 } else { 0 };
            assert_eq!(*v, int(2, expect), "coefficient at {j:?}");
        }
    }

    #[test]
    fn newton_reproduces_grid_values() {
        let g = grid(2, 3, |i| {
            let x = RatFunc::var(2, 0);
            &x.pow(i[0] + 1) + &int(2, (i[1] * i[1] * i[0]) as i64)
        });
        let c = newton_coeffs(&g).unwrap();
        for (i, v) in &g.values {
            assert_eq!(eval_falling_factorial_sum(&c, i.exponents()), *v);
        }
    }

    #[test]
    fn incomplete_grid() {
        let mut g = grid(1, 2, |_| int(1, 1));
        g.values.remove(&idx(&[1]));
        assert_eq!(newton_coeffs(&g), Err(Error::IncompleteGrid(vec![1])));
        assert_eq!(reconstruct_operator(&g), Err(Error::IncompleteGrid(vec![1])));
    }

    #[test]
    fn reconstruct_second_derivative() {
        let g = grid(1, 2, |i| if i[0] == 2 { int(1, 2) } else { int(1, 0) });
        let e = reconstruct_operator(&g).unwrap();
        assert_eq!(e, DiffOp::partial(idx(&[2])));
    }

    #[test]
    fn reconstruct_euler_operator() {
        let t = RatFunc::var(1, 0);
        let euler = DiffOp::partial(idx(&[1])).scale(&t);
        let g = GridValues::tabulate(&euler, 2).unwrap();
        assert_eq!(reconstruct_operator(&g).unwrap(), euler);
        let zero = grid(1, 2, |_| int(1, 0));
        assert!(reconstruct_operator(&zero).unwrap().is_zero());
    }

    #[test]
    fn degree_overflow_detection() {
        // d1^2 d2 has degree 3; its {0..2}^2 grid is not degree-2 data.
        let e = DiffOp::partial(idx(&[2, 1]));
        let g = GridValues::tabulate(&e, 2).unwrap();
        assert_eq!(
            reconstruct_operator(&g),
            Err(Error::DegreeOverflow { index: vec![2, 1], bound: 2 })
        );
        let g3 = GridValues::tabulate(&e, 3).unwrap();
        assert_eq!(reconstruct_operator(&g3).unwrap(), e);
        // d1^3 vanishes on the {0..2}^2 grid: consistent with zero
        let cube = DiffOp::partial(idx(&[3, 0]));
        let g = GridValues::tabulate(&cube, 2).unwrap();
        assert!(reconstruct_operator(&g).unwrap().is_zero());
    }

    #[test]
    fn fit_examples() {
        let t = RatFunc::var(1, 0);
        let one = int(1, 1);
        let table = MapTable::new(1, vec![(t.clone(), one.clone()), (&t + &one, one.clone())]).unwrap();
        let fit = fit_operator(&table, 1, true).unwrap();
        assert_eq!(fit, Fit::Solved { operator: DiffOp::partial(idx(&[1])), nullity: 0 });

        let table = MapTable::new(1, vec![(t.clone(), one.clone())]).unwrap();
        assert_eq!(
            fit_operator(&table, 0, true).unwrap(),
            Fit::Infeasible { row: 0, element: t.clone() }
        );

        let euler = DiffOp::partial(idx(&[1])).scale(&t);
        let table = MapTable::tabulate(&euler, &[t.clone(), t.pow(2), t.pow(3)]).unwrap();
        let fit = fit_operator(&table, 2, true).unwrap();
        assert_eq!(fit.operator(), Some(&euler));
    }

    #[test]
    fn recurrence_examples() {
        let ints = |v: &[i64]| v.iter().map(|&x| int(1, x)).collect::<Vec<_>>();
        let fib = RecurrenceSpec::new(ints(&[-1, -1, 1]), ints(&[1, 1, 2, 3, 5, 8])).unwrap();
        assert_eq!(check_recurrence(&fib), RecurrenceCheck::Pass);

        let t = RatFunc::var(1, 0);
        let geo = RecurrenceSpec::new(vec![-&t, int(1, 1)], (0..6).map(|n| t.pow(n)).collect()).unwrap();
        assert_eq!(check_recurrence(&geo), RecurrenceCheck::Pass);

        let bad = RecurrenceSpec::new(ints(&[-1, -1, 1]), ints(&[1, 1, 2, 3, 6])).unwrap();
        assert_eq!(check_recurrence(&bad), RecurrenceCheck::FailAt(4));

        assert!(RecurrenceSpec::new(ints(&[1, 0]), ints(&[1, 2])).is_err());
        assert!(RecurrenceSpec::new(ints(&[1, 1, 1]), ints(&[1, 2])).is_err());
    }
}
