//! Leibniz defects `B(x, y) = D(xy) - D(x) y - D(y) x` and order checks for
//! maps `K -> K`.
//!
//! A map has order `<= n` when it is additive and every `n`-fold nested
//! defect vanishes identically; order `0` is the zero map. For black-box maps
//! the checks here are refutations on finite data: a pass means "consistent
//! with order `<= n` on the given samples", not a proof. Exact orders are
//! available for canonical operators through [`order_exact`].

use std::collections::HashMap;
use std::fmt;

use crate::deriv::{Derivation, DiffOp};
use crate::error::{check_dims, Error, Result};
use crate::exactnum::RatFunc;
use crate::sample::Sampler;

/// A total map `K -> K` that can be evaluated pointwise.
pub trait PointMap {
    fn nvars(&self) -> usize;
    fn eval(&self, x: &RatFunc) -> Result<RatFunc>;
}

impl PointMap for DiffOp {
    fn nvars(&self) -> usize {
        DiffOp::nvars(self)
    }
    fn eval(&self, x: &RatFunc) -> Result<RatFunc> {
        self.apply(x)
    }
}

impl PointMap for Derivation {
    fn nvars(&self) -> usize {
        Derivation::nvars(self)
    }
    fn eval(&self, x: &RatFunc) -> Result<RatFunc> {
        self.apply(x)
    }
}

impl<T: PointMap + ?Sized> PointMap for &T {
    fn nvars(&self) -> usize {
        (**self).nvars()
    }
    fn eval(&self, x: &RatFunc) -> Result<RatFunc> {
        (**self).eval(x)
    }
}

/// Host-provided pure function as a [`PointMap`].
pub struct FnMap<F> {
    nvars: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&RatFunc) -> Result<RatFunc>,
{
    pub fn new(nvars: usize, f: F) -> Self {
        FnMap { nvars, f }
    }
}

impl<F> PointMap for FnMap<F>
where
    F: Fn(&RatFunc) -> Result<RatFunc>,
{
    fn nvars(&self) -> usize {
        self.nvars
    }
    fn eval(&self, x: &RatFunc) -> Result<RatFunc> {
        (self.f)(x)
    }
}

/// Function on a finite set `F` of field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapTable {
    nvars: usize,
    entries: Vec<(RatFunc, RatFunc)>,
    index: HashMap<RatFunc, usize>,
}

impl MapTable {
    /// Elements must be pairwise distinct.
    pub fn new(nvars: usize, entries: Vec<(RatFunc, RatFunc)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (x, v)) in entries.iter().enumerate() {
            check_dims(nvars, x.nvars())?;
            check_dims(nvars, v.nvars())?;
            if index.insert(x.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate table element {x}")));
            }
        }
        Ok(MapTable {
            nvars,
            entries,
            index,
        })
    }

    /// Restriction of `map` to `elements` (duplicates are dropped).
    pub fn tabulate<M: PointMap>(map: &M, elements: &[RatFunc]) -> Result<Self> {
        let mut entries: Vec<(RatFunc, RatFunc)> = Vec::new();
        let mut seen = HashMap::new();
        for x in elements {
            if seen.insert(x.clone(), ()).is_none() {
                entries.push((x.clone(), map.eval(x)?));
            }
        }
        MapTable::new(map.nvars(), entries)
    }

    pub fn entries(&self) -> &[(RatFunc, RatFunc)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: &RatFunc) -> Option<&RatFunc> {
        self.index.get(x).map(|&i| &self.entries[i].1)
    }
}

impl PointMap for MapTable {
    fn nvars(&self) -> usize {
        self.nvars
    }
    fn eval(&self, x: &RatFunc) -> Result<RatFunc> {
        self.get(x)
            .cloned()
            .ok_or_else(|| Error::NotInTable(x.to_string()))
    }
}

/// `B(x, y) = D(xy) - D(x) y - D(y) x`.
pub fn defect<M: PointMap + ?Sized>(d: &M, x: &RatFunc, y: &RatFunc) -> Result<RatFunc> {
    let xy = x * y;
    let dxy = d.eval(&xy)?;
    let dx = d.eval(x)?;
    let dy = d.eval(y)?;
    Ok(&(&dxy - &(&dx * y)) - &(&dy * x))
}

/// `(((D_{y1})_{y2}) ... )_{ym}(x)` with `D_y(x) = D(xy) - y D(x) - x D(y)`.
///
/// With no `ys` this is `D(x)`. Every evaluation of `D` happens at a product
/// of a subset of `{x, y1, ..., ym}`, so at most `2^(m+1)` calls are made.
pub fn nested_defect<M: PointMap + ?Sized>(d: &M, x: &RatFunc, ys: &[RatFunc]) -> Result<RatFunc> {
    let m = ys.len();
    assert!(m < 31, "nesting depth");
    let elems: Vec<&RatFunc> = std::iter::once(x).chain(ys).collect();
    let mut nd = NestedEval {
        map: d,
        elems,
        products: HashMap::new(),
        values: HashMap::new(),
        levels: HashMap::new(),
    };
    nd.level(m, 1)
}

struct NestedEval<'a, M: ?Sized> {
    map: &'a M,
    elems: Vec<&'a RatFunc>,
    products: HashMap<u32, RatFunc>,
    values: HashMap<u32, RatFunc>,
    levels: HashMap<(usize, u32), RatFunc>,
}

impl<M: PointMap + ?Sized> NestedEval<'_, M> {
    fn product(&mut self, mask: u32) -> RatFunc {
        if let Some(p) = self.products.get(&mask) {
            return p.clone();
        }
        let low = mask.trailing_zeros();
        let rest = mask & (mask - 1);
        let p = if rest == 0 {
            self.elems[low as usize].clone()
        } else {
            &self.product(rest) * self.elems[low as usize]
        };
        self.products.insert(mask, p.clone());
        p
    }

    /// Level-`l` map evaluated at the product of the elements in `mask`.
    fn level(&mut self, l: usize, mask: u32) -> Result<RatFunc> {
        if let Some(v) = self.levels.get(&(l, mask)) {
            return Ok(v.clone());
        }
        let v = if l == 0 {
            if let Some(v) = self.values.get(&mask) {
                v.clone()
            } else {
                let p = self.product(mask);
                let v = self.map.eval(&p)?;
                self.values.insert(mask, v.clone());
                v
            }
        } else {
            let ybit = 1u32 << l;
            let y = self.elems[l].clone();
            let x = self.product(mask);
            let joint = self.level(l - 1, mask | ybit)?;
            let at_x = self.level(l - 1, mask)?;
            let at_y = self.level(l - 1, ybit)?;
            &(&joint - &(&y * &at_x)) - &(&x * &at_y)
        };
        self.levels.insert((l, mask), v.clone());
        Ok(v)
    }
}

/// What made an order check fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `D(x + y) != D(x) + D(y)`.
    NotAdditive { x: RatFunc, y: RatFunc },
    /// `D(1) != 0`.
    NonzeroAtOne { value: RatFunc },
    /// Nonzero nested defect at `args = (x, y1, ..., yn)`.
    NestedDefect { args: Vec<RatFunc>, value: RatFunc },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotAdditive { x, y } => {
                write!(f, "not additive at x = {x}, y = {y}")
            }
            Violation::NonzeroAtOne { value } => write!(f, "D(1) = {value} != 0"),
            Violation::NestedDefect { args, value } => {
                let args: Vec<String> = args.iter().map(ToString::to_string).collect();
                write!(f, "nested defect at ({}) = {value}", args.join(", "))
            }
        }
    }
}

/// Outcome of [`order_upper_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderCheck {
    pub violation: Option<Violation>,
    /// Conditions evaluated.
    pub checked: usize,
    /// Conditions skipped because a needed value was outside a table.
    pub skipped: usize,
}

impl OrderCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn skip_missing(r: Result<RatFunc>) -> Result<Option<RatFunc>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotInTable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Test the necessary conditions for order `<= n` on `samples`: additivity on
/// all sample pairs, `D(1) = 0`, and vanishing of every `n`-fold nested
/// defect over `samples^(n+1)`.
///
/// For a [`MapTable`], conditions needing a value outside the table are
/// skipped and counted. A pass is evidence, not proof.
pub fn order_upper_check<M: PointMap + ?Sized>(
    d: &M,
    n: usize,
    samples: &[RatFunc],
) -> Result<OrderCheck> {
    assert!(!samples.is_empty(), "order check needs samples");
    let mut report = OrderCheck {
        violation: None,
        checked: 0,
        skipped: 0,
    };
    for (i, x) in samples.iter().enumerate() {
        for y in &samples[i..] {
            let lhs = skip_missing(d.eval(&(x + y)))?;
            let dx = skip_missing(d.eval(x))?;
            let dy = skip_missing(d.eval(y))?;
            match (lhs, dx, dy) {
                (Some(l), Some(a), Some(b)) => {
                    report.checked += 1;
                    if l != &a + &b {
                        report.violation = Some(Violation::NotAdditive {
                            x: x.clone(),
                            y: y.clone(),
                        });
                        return Ok(report);
                    }
                }
                _ => report.skipped += 1,
            }
        }
    }

    match skip_missing(d.eval(&RatFunc::one(d.nvars())))? {
        Some(v) => {
            report.checked += 1;
            if !v.is_zero() {
                report.violation = Some(Violation::NonzeroAtOne { value: v });
                return Ok(report);
            }
        }
        None => report.skipped += 1,
    }

    let s = samples.len();
    let total = s.pow(n as u32 + 1);
    let mut args = Vec::with_capacity(n + 1);
    for code in 0..total {
        args.clear();
        let mut c = code;
        for _ in 0..=n {
            args.push(samples[c % s].clone());
            c /= s;
        }
        match skip_missing(nested_defect(d, &args[0], &args[1..]))? {
            Some(v) => {
                report.checked += 1;
                if !v.is_zero() {
                    report.violation = Some(Violation::NestedDefect {
                        args: args.clone(),
                        value: v,
                    });
                    return Ok(report);
                }
            }
            None => report.skipped += 1,
        }
    }
    Ok(report)
}

/// Exact derivation order of a canonical operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOrder {
    pub order: usize,
    /// Set for the zero operator, reported as order 0.
    pub zero_map: bool,
}

/// Exact order of `E` with `E(1) = 0`: equal to its degree, since the maps
/// of order `<= n` on `K` are exactly the operators of degree `<= n` without
/// identity term.
pub fn order_exact(e: &DiffOp) -> Result<ExactOrder> {
    if let Some(c) = e.identity_coeff() {
        return Err(Error::NotInO0 {
            coefficient: c.to_string(),
        });
    }
    Ok(if e.is_zero() {
        ExactOrder {
            order: 0,
            zero_map: true,
        }
    } else {
        ExactOrder {
            order: e.degree() as usize,
            zero_map: false,
        }
    })
}

/// A tuple `(x, y1, ..., ym)` and the nested defect value there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub args: Vec<RatFunc>,
    pub value: RatFunc,
}

/// Seeded random tuples for `m`-fold nested defects.
pub fn defect_tuples(nvars: usize, m: usize, count: usize, seed: u64) -> Vec<Vec<RatFunc>> {
    let mut s = Sampler::new(seed, nvars);
    (0..count).map(|_| s.tuple(m + 1)).collect()
}

/// First tuple among `tuples` where the `m`-fold nested defect (`m` is the
/// tuple length minus one) is nonzero.
pub fn first_nonvanishing<M: PointMap + ?Sized>(
    d: &M,
    tuples: &[Vec<RatFunc>],
) -> Result<Option<Witness>> {
    for args in tuples {
        let value = nested_defect(d, &args[0], &args[1..])?;
        if !value.is_zero() {
            return Ok(Some(Witness {
                args: args.clone(),
                value,
            }));
        }
    }
    Ok(None)
}

/// Search up to `tries` seeded random tuples for a nonvanishing `m`-fold
/// nested defect. Finding one proves the map does not have order `<= m`.
pub fn find_defect_witness<M: PointMap + ?Sized>(
    d: &M,
    m: usize,
    tries: usize,
    seed: u64,
) -> Result<Option<Witness>> {
    first_nonvanishing(d, &defect_tuples(d.nvars(), m, tries, seed))
}
