//! Gaussian elimination over the fraction field `K`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::exactnum::{poly_gcd, MultiPoly, RatFunc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// A solution with every free variable set to zero, and the dimension
    /// of the solution space.
    Solved { values: Vec<RatFunc>, nullity: usize },
    /// The original row that reduced to `0 = c` with `c != 0`.
    Inconsistent { row: usize },
}

/// Solve `A x = b` for an `m x n` matrix given as rows.
///
/// Each row is cleared of denominators, then reduced by fraction-free
/// Gauss-Jordan elimination over the polynomial ring: every division is
/// exact and every entry stays a minor of the cleared matrix. The pivot in
/// each column is the nonzero entry with the fewest terms.
pub fn solve(rows: Vec<Vec<RatFunc>>, rhs: Vec<RatFunc>, ncols: usize, nvars: usize) -> Solution {
    assert_eq!(rows.len(), rhs.len(), "one right-hand side per row");
    let m = rows.len();
    // augmented polynomial rows; column `ncols` is the right-hand side
    let mut a: Vec<Vec<MultiPoly>> = rows
        .into_iter()
        .zip(rhs)
        .map(|(mut row, b)| {
            assert_eq!(row.len(), ncols, "row length");
            row.push(b);
            clear_denominators(&row, nvars)
        })
        .collect();
    let mut origin: Vec<usize> = (0..m).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = MultiPoly::one(nvars);
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m)
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].num_terms())
        else {
            continue;
        };
        a.swap(r, p);
        origin.swap(r, p);

        let pivot_row = a[r].clone();
        let pivot = pivot_row[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[col].clone();
            for (j, (x, p)) in row.iter_mut().zip(&pivot_row).enumerate() {
                if j == col {
                    continue;
                }
                let mut t = &pivot * &*x;
                if !factor.is_zero() && !p.is_zero() {
                    t = &t - &(&factor * p);
                }
                *x = t.div_exact(&prev).expect("fraction-free step divides exactly");
            }
            row[col] = MultiPoly::zero(nvars);
        }
        prev = pivot;
        pivots.push(col);
        r += 1;
    }

    if let Some(i) = (r..m).find(|&i| !a[i][ncols].is_zero()) {
        return Solution::Inconsistent { row: origin[i] };
    }
    let mut values = vec![RatFunc::zero(nvars); ncols];
    for (i, &col) in pivots.iter().enumerate() {
        values[col] = RatFunc::new(a[i][ncols].clone(), a[i][col].clone()).expect("pivot is nonzero");
    }
    Solution::Solved {
        values,
        nullity: ncols - pivots.len(),
    }
}

/// Scale a row by the lcm of its denominators, then to integer
/// coefficients.
fn clear_denominators(row: &[RatFunc], nvars: usize) -> Vec<MultiPoly> {
    let mut l = MultiPoly::one(nvars);
    for x in row {
        if !x.denom().is_one() {
            let g = poly_gcd(&l, x.denom());
            l = &l * &x.denom().div_exact(&g).expect("gcd divides");
        }
    }
    let cleared: Vec<MultiPoly> = row
        .iter()
        .map(|x| {
            let cofactor = l.div_exact(x.denom()).expect("lcm is a multiple");
            x.numer() * &cofactor
        })
        .collect();
    let den = cleared
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| c.denom().clone()).collect::<Vec<_>>())
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let scale = BigRational::from_integer(den);
    cleared.iter().map(|p| p.scale(&scale)).collect()
}
