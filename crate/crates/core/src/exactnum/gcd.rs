//! Multivariate gcd over `Q`.
//!
//! The heuristic gcd (evaluate at a large integer, take the gcd of the
//! images, lift back by xi-adic expansion, confirm by trial division) is
//! tried first; recursive content / primitive-part reduction to univariate
//! primitive pseudo-remainder sequences is the fallback.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::poly::MultiPoly;

/// Greatest common divisor, normalized to coprime integer coefficients with
/// a positive graded-lex leading coefficient. `gcd(0, b)` is `b` normalized,
/// and `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.nvars(), b.nvars(), "gcd of polynomials in different rings");
    if a.is_zero() {
        return b.integer_primitive().1;
    }
    if b.is_zero() {
        return a.integer_primitive().1;
    }
    gcd_nonzero(a, b).integer_primitive().1
}

/// Gcd of two nonzero polynomials, up to a unit of `Q`.
fn gcd_nonzero(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let nvars = a.nvars();
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(nvars);
    }
    if a.num_terms() == 1 || b.num_terms() == 1 {
        return MultiPoly::monomial(
            monomial_content(a).gcd(&monomial_content(b)),
            BigRational::one(),
        );
    }

    let in_a = a.occurring_vars();
    let in_b = b.occurring_vars();
    // A variable present on one side only can be eliminated through the
    // content with respect to that variable.
    if let Some(v) = (0..nvars).find(|&v| in_a[v] != in_b[v]) {
        return if in_a[v] {
            gcd_nonzero(&content_in(a, v), b)
        } else {
            gcd_nonzero(a, &content_in(b, v))
        };
    }
    let vars: Vec<usize> = (0..nvars).filter(|&v| in_a[v]).collect();
    if let Some(g) = heu(&a.integer_primitive().1, &b.integer_primitive().1, &vars) {
        return g;
    }
    let v = pick_main_var(a, b, &in_a);

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd_nonzero(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = primitive_prs(pa, pb, v);
    &c * &g
}

/// Evaluation points grow past this many bits before giving up.
const HEU_MAX_BITS: u64 = 20_000;
const HEU_TRIES: usize = 6;

fn max_norm(p: &MultiPoly) -> BigInt {
    p.terms()
        .map(|(_, c)| c.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// Integer content and the primitive part (integer coefficients throughout).
fn split_content(p: &MultiPoly) -> (BigInt, MultiPoly) {
    let c = p
        .terms()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    let inv = BigRational::new(BigInt::one(), c.clone());
    (c, p.scale(&inv))
}

/// Substitute `t_{v+1} = xi`.
fn eval_at(p: &MultiPoly, v: usize, xi: &BigInt) -> MultiPoly {
    let mut powers = vec![BigInt::one()];
    let terms: Vec<(Monomial, BigRational)> = p
        .terms()
        .map(|(m, c)| {
            let e = m.get(v) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * xi;
                powers.push(next);
            }
            (m.with(v, 0), c * BigRational::from_integer(powers[e].clone()))
        })
        .collect();
    MultiPoly::from_terms(p.nvars(), terms)
}

/// Coefficientwise symmetric residue in `(-xi/2, xi/2]`.
fn symmetric_mod(p: &MultiPoly, xi: &BigInt) -> MultiPoly {
    let half = xi / 2u32;
    let terms: Vec<(Monomial, BigRational)> = p
        .terms()
        .map(|(m, c)| {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            (m.clone(), BigRational::from_integer(r))
        })
        .collect();
    MultiPoly::from_terms(p.nvars(), terms)
}

/// Rebuild `G` with `G(t_{v+1} = xi) = gamma` and small coefficients.
fn lift(gamma: &MultiPoly, v: usize, xi: &BigInt) -> MultiPoly {
    let inv = BigRational::new(BigInt::one(), xi.clone());
    let mut rest = gamma.clone();
    let mut out = MultiPoly::zero(gamma.nvars());
    let mut i = 0;
    while !rest.is_zero() {
        let digit = symmetric_mod(&rest, xi);
        rest = (&rest - &digit).scale(&inv);
        let shift = Monomial::one(gamma.nvars()).with(v, i);
        out = &out + &digit.mul_monomial(&shift, &BigRational::one());
        i += 1;
    }
    out
}

/// Full gcd (integer content included) of nonzero integer polynomials in
/// `vars`, or `None` when the heuristic gives up.
fn heu(a: &MultiPoly, b: &MultiPoly, vars: &[usize]) -> Option<MultiPoly> {
    let (ca, pa) = split_content(a);
    let (cb, pb) = split_content(b);
    let c = BigRational::from_integer(ca.gcd(&cb));
    let Some((&v, rest)) = vars.split_last() else {
        return Some(MultiPoly::constant(a.nvars(), c));
    };
    let deg = pa.degree_in(v).max(pb.degree_in(v)) as u64 + 1;
    let mut xi: BigInt = max_norm(&pa).min(max_norm(&pb)) * 2u32 + 29u32;
    for _ in 0..HEU_TRIES {
        if xi.bits() * deg > HEU_MAX_BITS {
            return None;
        }
        let av = eval_at(&pa, v, &xi);
        let bv = eval_at(&pb, v, &xi);
        if !av.is_zero() && !bv.is_zero() {
            let gamma = heu(&av, &bv, rest)?;
            let g = lift(&gamma, v, &xi);
            if !g.is_zero() {
                let g = g.integer_primitive().1;
                if pa.div_exact(&g).is_some() && pb.div_exact(&g).is_some() {
                    return Some(g.scale(&c));
                }
            }
        }
        xi = xi * 73794u32 / 27011u32;
    }
    None
}

/// Main variable: the shared variable of smallest combined degree.
fn pick_main_var(a: &MultiPoly, b: &MultiPoly, present: &[bool]) -> usize {
    (0..a.nvars())
        .filter(|&v| present[v])
        .min_by_key(|&v| a.degree_in(v) + b.degree_in(v))
        .expect("nonconstant polynomial has a variable")
}

fn monomial_content(p: &MultiPoly) -> Monomial {
    let mut it = p.terms().map(|(m, _)| m);
    let first = it.next().expect("nonzero").clone();
    it.fold(first, |acc, m| acc.gcd(m))
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `t_{v+1}`.
fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let mut coeffs: Vec<MultiPoly> = p
        .to_univariate(v)
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    // Fewest terms first: small gcds terminate the fold early.
    coeffs.sort_by_key(MultiPoly::num_terms);
    let mut acc = coeffs[0].integer_primitive().1;
    for c in &coeffs[1..] {
        if acc.is_constant() {
            break;
        }
        acc = gcd_nonzero(&acc, c).integer_primitive().1;
    }
    if acc.is_constant() {
        MultiPoly::one(p.nvars())
    } else {
        acc
    }
}

fn primitive_part_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let c = content_in(p, v);
    let pp = if c.is_one() {
        p.clone()
    } else {
        p.div_exact(&c).expect("content divides")
    };
    pp.integer_primitive().1
}

/// Gcd of two polynomials that are primitive with respect to `t_{v+1}`.
fn primitive_prs(a: MultiPoly, b: MultiPoly, v: usize) -> MultiPoly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if b.degree_in(v) == 0 {
            // b is primitive and free of v, hence a unit.
            return MultiPoly::one(a.nvars());
        }
        let r = pseudo_remainder(&a, &b, v);
        if r.is_zero() {
            return b.integer_primitive().1;
        }
        if r.degree_in(v) == 0 {
            return MultiPoly::one(a.nvars());
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

/// `lc(b)^(deg a - deg b + 1) * a mod b` in `D[t_{v+1}]`.
fn pseudo_remainder(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let mut r = a.to_univariate(v);
    let bu = b.to_univariate(v);
    let db = bu.len() - 1;
    let lcb = &bu[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lcb;
        }
        for (i, bc) in bu.iter().enumerate() {
            let t = &r[i + shift] - &(bc * &lcr);
            r[i + shift] = t;
        }
        while r.last().is_some_and(MultiPoly::is_zero) {
            r.pop();
        }
    }
    if r.is_empty() {
        MultiPoly::zero(a.nvars())
    } else {
        MultiPoly::from_univariate(v, &r)
    }
}
