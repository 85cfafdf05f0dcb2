//! Exact moment recursions of the Brownian area functionals and the limiting
//! moments built from them.
//!
//! Every table is a dense array of rationals; reads outside the computed box return 0.

use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, ratio, ratio_to_f64, render};
use crate::radical::{gamma_half, ExactRadical};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableKind {
    K,
    Q,
    C,
    Qnt,
    Dk,
    Dpm,
    Lpm,
    Labs,
}

impl TableKind {
    pub fn index_names(self) -> &'static [&'static str] {
        match self {
            TableKind::K | TableKind::Q | TableKind::Dk => &["n"],
            TableKind::C | TableKind::Qnt | TableKind::Labs => &["n", "t"],
            TableKind::Dpm => &["k", "l"],
            TableKind::Lpm => &["k", "l", "t"],
        }
    }
}

impl FromStr for TableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "k" => TableKind::K,
            "q" => TableKind::Q,
            "c" | "cnt" => TableKind::C,
            "qnt" => TableKind::Qnt,
            "dk" | "d" => TableKind::Dk,
            "dpm" => TableKind::Dpm,
            "lpm" => TableKind::Lpm,
            "labs" => TableKind::Labs,
            other => return Err(Error::Config(format!("unknown table kind {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecursionTable {
    pub kind: TableKind,
    /// extent along each index (exclusive upper bounds)
    pub dims: Vec<usize>,
    pub entries: Vec<BigRational>,
}

impl RecursionTable {
    fn zeros(kind: TableKind, dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        RecursionTable { kind, dims, entries: vec![BigRational::zero(); len] }
    }

    fn offset(&self, idx: &[i64]) -> Option<usize> {
        assert_eq!(idx.len(), self.dims.len(), "wrong arity for {:?}", self.kind);
        let mut off = 0usize;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            if i < 0 || i as usize >= d {
                return None;
            }
            off = off * d + i as usize;
        }
        Some(off)
    }

    /// Entry at `idx`; 0 outside the table.
    pub fn get(&self, idx: &[i64]) -> BigRational {
        self.offset(idx).map(|o| self.entries[o].clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn contains(&self, idx: &[i64]) -> bool {
        self.offset(idx).is_some()
    }

    fn set(&mut self, idx: &[i64], v: BigRational) {
        let o = self.offset(idx).expect("index inside table");
        self.entries[o] = v;
    }

    /// Row-major iteration over `(index, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &BigRational)> + '_ {
        self.entries.iter().enumerate().map(move |(mut o, v)| {
            let mut idx = vec![0; self.dims.len()];
            for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
                *slot = o % d;
                o /= d;
            }
            (idx, v)
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.kind.index_names().to_vec();
        header.extend(["exact", "float"]);
        wtr.write_record(&header)?;
        for (idx, v) in self.iter() {
            let mut rec: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            rec.push(render(v));
            rec.push(format!("{:e}", ratio_to_f64(v)));
            wtr.write_record(&rec)?;
        }
        wtr.flush()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .iter()
            .map(|(idx, v)| serde_json::json!({ "index": idx, "exact": render(v), "float": ratio_to_f64(v) }))
            .collect();
        serde_json::json!({ "kind": self.kind, "dims": self.dims, "entries": rows })
    }
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `K_0 .. K_n_max`
pub fn kn_sequence(n_max: usize) -> RecursionTable {
    let mut t = RecursionTable::zeros(TableKind::K, vec![n_max + 1]);
    let mut k: Vec<BigRational> = Vec::with_capacity(n_max + 1);
    k.push(ratio(-1, 2));
    for n in 1..=n_max {
        let mut v = ratio(3 * n as i64 - 4, 4) * &k[n - 1];
        for l in 1..n {
            v += &k[l] * &k[n - l];
        }
        k.push(v);
    }
    for (n, v) in k.into_iter().enumerate() {
        t.set(&[n as i64], v);
    }
    t
}

/// `Q_0 .. Q_n_max`
pub fn qn_sequence(n_max: usize) -> RecursionTable {
    let k = kn_sequence(n_max);
    let mut q = RecursionTable::zeros(TableKind::Q, vec![n_max + 1]);
    q.set(&[0], BigRational::one());
    for n in 1..=n_max as i64 {
        let mut v = ratio(3 * n - 2, 2) * q.get(&[n - 1]);
        for l in 1..=n {
            v += r(2) * k.get(&[l]) * q.get(&[n - l]);
        }
        q.set(&[n], v);
    }
    q
}

/// `C_{n,t}` for `n <= n_max`, `t <= t_max + 2 n_max`.
pub fn cnt_table(n_max: usize, t_max: usize) -> RecursionTable {
    let width = t_max + 2 * n_max + 1;
    // row n needs row n-1 two columns further out, so build on a wider strip
    let strip = width + 2 * n_max + 2;
    let mut full = RecursionTable::zeros(TableKind::C, vec![n_max + 1, strip]);
    for t in 0..strip as i64 {
        full.set(&[0, t], BigRational::one());
    }
    for n in 1..=n_max as i64 {
        let reach = strip as i64 - 2 * n;
        for t in 0..reach {
            let v = full.get(&[n, t - 1]) + r(t + 2) * full.get(&[n - 1, t + 2]);
            full.set(&[n, t], v);
        }
    }
    crop(&full, &[n_max + 1, width])
}

/// `Q_{n,t}` for `n <= n_max`, `t <= t_max`.
pub fn qnt_table(n_max: usize, t_max: usize) -> RecursionTable {
    let strip = t_max + n_max + 2;
    let c = cnt_table(n_max, 1);
    let mut full = RecursionTable::zeros(TableKind::Qnt, vec![n_max + 1, strip]);
    for t in 0..strip as i64 {
        full.set(&[0, t], BigRational::one());
    }
    let eighth = ratio(1, 8);
    let mut eighth_pow = BigRational::one();
    for n in 1..=n_max as i64 {
        eighth_pow *= &eighth;
        let q0 = full.get(&[n - 1, 1]) - r(2) * &eighth_pow * c.get(&[n - 1, 1]);
        full.set(&[n, 0], q0);
        for t in 1..strip as i64 - n {
            let v = full.get(&[n, t - 2]) + r(t + 1) * full.get(&[n - 1, t + 1]);
            full.set(&[n, t], v);
        }
    }
    crop(&full, &[n_max + 1, t_max + 1])
}

fn crop(src: &RecursionTable, dims: &[usize]) -> RecursionTable {
    let mut out = RecursionTable::zeros(src.kind, dims.to_vec());
    let entries: Vec<(Vec<usize>, BigRational)> = out.iter().map(|(i, _)| (i, BigRational::zero())).collect();
    for (idx, _) in entries {
        let signed: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
        out.set(&signed, src.get(&signed));
    }
    out
}

/// `D_k` and `D±_{k,l}` for `k, l <= k_max`, by exact series inversion.
pub fn dk_dpm_tables(k_max: usize) -> (RecursionTable, RecursionTable) {
    let k = kn_sequence(k_max);
    let mut d = RecursionTable::zeros(TableKind::Dk, vec![k_max + 1]);
    d.set(&[0], BigRational::one());
    for n in 1..=k_max as i64 {
        let mut v = BigRational::zero();
        for j in 1..=n {
            v += r(2) * k.get(&[j]) * d.get(&[n - j]);
        }
        d.set(&[n], v);
    }
    let mut dpm = RecursionTable::zeros(TableKind::Dpm, vec![k_max + 1, k_max + 1]);
    for a in 0..=k_max as i64 {
        for b in 0..=k_max as i64 {
            let mut v = if a == 0 && b == 0 { BigRational::one() } else { BigRational::zero() };
            for j in 1..=a {
                v += k.get(&[j]) * dpm.get(&[a - j, b]);
            }
            for j in 1..=b {
                v += k.get(&[j]) * dpm.get(&[a, b - j]);
            }
            dpm.set(&[a, b], v);
        }
    }
    (d, dpm)
}

/// Both routes to the walk tables, kept so that they can be compared.
#[derive(Clone, Debug)]
pub struct WalkTables {
    pub lpm: RecursionTable,
    pub labs: RecursionTable,
    pub lpm_convolution: RecursionTable,
    pub labs_convolution: RecursionTable,
}

/// `L±_{k,l,t}` for `k, l <= k_max`, `t <= t_max`, and `L_{n,t}` for `n <= k_max`, `t <= t_max`.
///
/// The values come from the linear recursion in `K_j`; the convolution forms over
/// `Q_{n,t}` and the `D` tables are computed alongside and any mismatch is reported
/// as an internal inconsistency.
pub fn lpm_labs_tables(k_max: usize, t_max: usize) -> Result<(RecursionTable, RecursionTable)> {
    let w = walk_tables(k_max, t_max);
    if w.lpm != relabel(&w.lpm_convolution, TableKind::Lpm) {
        return Err(Error::InternalInconsistency("L± recursion and convolution forms disagree".into()));
    }
    if w.labs != relabel(&w.labs_convolution, TableKind::Labs) {
        return Err(Error::InternalInconsistency("L recursion and convolution forms disagree".into()));
    }
    Ok((w.lpm, w.labs))
}

fn relabel(t: &RecursionTable, kind: TableKind) -> RecursionTable {
    RecursionTable { kind, ..t.clone() }
}

pub fn walk_tables(k_max: usize, t_max: usize) -> WalkTables {
    let k = kn_sequence(k_max);
    let q = qnt_table(k_max, t_max);
    let (d, dpm) = dk_dpm_tables(k_max);
    let (km, tm) = (k_max as i64, t_max as i64);
    let half = ratio(1, 2);

    let mut lpm = RecursionTable::zeros(TableKind::Lpm, vec![k_max + 1, k_max + 1, t_max + 1]);
    let mut lpm_conv = lpm.clone();
    for t in 0..=tm {
        let sign = if t % 2 == 0 { half.clone() } else { -half.clone() };
        for a in 0..=km {
            for b in 0..=km {
                let mut v = BigRational::zero();
                if a == 0 && b == 0 {
                    v = if t % 2 == 0 { BigRational::one() } else { BigRational::zero() };
                } else {
                    for j in 1..=a {
                        v += k.get(&[j]) * lpm.get(&[a - j, b, t]);
                    }
                    for j in 1..=b {
                        v += k.get(&[j]) * lpm.get(&[a, b - j, t]);
                    }
                    if b == 0 {
                        v += &half * q.get(&[a, t]);
                    }
                    if a == 0 {
                        v += &sign * q.get(&[b, t]);
                    }
                }
                lpm.set(&[a, b, t], v);

                let mut c = BigRational::zero();
                for i in 0..=a {
                    c += &half * q.get(&[a - i, t]) * dpm.get(&[i, b]);
                }
                for j in 0..=b {
                    c += &sign * q.get(&[b - j, t]) * dpm.get(&[a, j]);
                }
                lpm_conv.set(&[a, b, t], c);
            }
        }
    }

    let mut labs = RecursionTable::zeros(TableKind::Labs, vec![k_max + 1, t_max + 1]);
    let mut labs_conv = labs.clone();
    for t in (0..=tm).step_by(2) {
        for n in 0..=km {
            let mut v = q.get(&[n, t]);
            for j in 1..=n {
                v += r(2) * k.get(&[j]) * labs.get(&[n - j, t]);
            }
            labs.set(&[n, t], v);
            let mut c = BigRational::zero();
            for i in 0..=n {
                c += q.get(&[n - i, t]) * d.get(&[i]);
            }
            labs_conv.set(&[n, t], c);
        }
    }
    WalkTables { lpm, labs, lpm_convolution: lpm_conv, labs_convolution: labs_conv }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitKind {
    /// Brownian excursion area, order `n`
    Bea,
    /// Brownian meander area, order `n`
    Bma,
    /// meander area and endpoint, orders `(n, t)`
    MeanderJoint,
    /// positive area, negative area and endpoint of Brownian motion, orders `(k, l, t)`
    WalkSigned,
    /// absolute area and endpoint of Brownian motion, orders `(n, t)`
    WalkAbs,
    /// Rayleigh law (meander endpoint), order `t`
    Rayleigh,
}

impl LimitKind {
    pub fn arity(self) -> usize {
        match self {
            LimitKind::Bea | LimitKind::Bma | LimitKind::Rayleigh => 1,
            LimitKind::MeanderJoint | LimitKind::WalkAbs => 2,
            LimitKind::WalkSigned => 3,
        }
    }
}

impl FromStr for LimitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "bea" => LimitKind::Bea,
            "bma" => LimitKind::Bma,
            "meanderjoint" | "meander" => LimitKind::MeanderJoint,
            "walksigned" | "signed" => LimitKind::WalkSigned,
            "walkabs" | "abs" => LimitKind::WalkAbs,
            "rayleigh" => LimitKind::Rayleigh,
            other => return Err(Error::Config(format!("unknown limit kind {other:?}"))),
        })
    }
}

/// Precomputed tables large enough for all moments of total order up to the given bounds.
#[derive(Clone, Debug)]
pub struct LimitTables {
    pub n_max: usize,
    pub t_max: usize,
    pub k: RecursionTable,
    pub q: RecursionTable,
    pub qnt: RecursionTable,
    pub lpm: RecursionTable,
    pub labs: RecursionTable,
}

impl LimitTables {
    pub fn new(n_max: usize, t_max: usize) -> Result<Self> {
        let (lpm, labs) = lpm_labs_tables(n_max, t_max)?;
        Ok(LimitTables {
            n_max,
            t_max,
            k: kn_sequence(n_max),
            q: qn_sequence(n_max),
            qnt: qnt_table(n_max, t_max),
            lpm,
            labs,
        })
    }

    pub fn moment(&self, kind: LimitKind, orders: &[usize]) -> Result<ExactRadical> {
        if orders.len() != kind.arity() {
            return Err(Error::OrderOutOfRange(format!("{kind:?} takes {} orders, got {}", kind.arity(), orders.len())));
        }
        let out_of_range = || Error::OrderOutOfRange(format!("{kind:?} {orders:?}"));
        let o: Vec<i64> = orders.iter().map(|&v| v as i64).collect();
        let fact = |n: i64| ExactRadical::rational(BigRational::from_integer(factorial(n as u64)));
        let rat = |v: BigRational| ExactRadical::rational(v);
        let need = |table: &RecursionTable, idx: &[i64]| -> Result<BigRational> {
            if table.contains(idx) {
                Ok(table.get(idx))
            } else {
                Err(out_of_range())
            }
        };
        let value = match kind {
            LimitKind::Bea => {
                let n = o[0];
                let kn = need(&self.k, &[n])?;
                let num = fact(n) * rat(kn) * gamma_half(-1)? * ExactRadical::sqrt2_pow(-n);
                let den = rat(ratio(-1, 2)) * gamma_half(3 * n - 1)?;
                &num / &den
            }
            LimitKind::Bma => {
                let n = o[0];
                let qn = need(&self.q, &[n])?;
                let num = fact(n) * rat(qn) * gamma_half(1)? * ExactRadical::sqrt2_pow(-n);
                &num / &gamma_half(3 * n + 1)?
            }
            LimitKind::MeanderJoint => {
                let (n, t) = (o[0], o[1]);
                let qnt = need(&self.qnt, &[n, t])?;
                let num = fact(n) * fact(t) * gamma_half(1)? * ExactRadical::sqrt2_pow(-(n + t)) * rat(qnt);
                &num / &gamma_half(3 * n + t + 1)?
            }
            LimitKind::WalkSigned => {
                let (k, l, t) = (o[0], o[1], o[2]);
                let v = need(&self.lpm, &[k, l, t])?;
                let num = fact(k) * fact(l) * fact(t) * ExactRadical::sqrt2_pow(-(k + l + t)) * rat(v);
                &num / &gamma_half(3 * k + 3 * l + t + 2)?
            }
            LimitKind::WalkAbs => {
                let (n, t) = (o[0], o[1]);
                let v = need(&self.labs, &[n, t])?;
                let num = fact(n) * fact(t) * ExactRadical::sqrt2_pow(-(n + t)) * rat(v);
                &num / &gamma_half(3 * n + t + 2)?
            }
            LimitKind::Rayleigh => {
                let t = o[0];
                ExactRadical::sqrt2_pow(t) * gamma_half(t + 2)?
            }
        };
        Ok(value)
    }
}

/// Exact limiting moment; builds just enough of the tables for the requested orders.
pub fn limiting_moment(kind: LimitKind, orders: &[usize]) -> Result<ExactRadical> {
    if orders.len() != kind.arity() {
        return Err(Error::OrderOutOfRange(format!("{kind:?} takes {} orders, got {}", kind.arity(), orders.len())));
    }
    let (n, t) = match kind {
        LimitKind::Bea | LimitKind::Bma => (orders[0], 0),
        LimitKind::Rayleigh => (0, orders[0]),
        LimitKind::MeanderJoint | LimitKind::WalkAbs => (orders[0], orders[1]),
        LimitKind::WalkSigned => (orders[0].max(orders[1]), orders[2]),
    };
    LimitTables::new(n, t)?.moment(kind, orders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn small_values() {
        let k = kn_sequence(3);
        assert_eq!(k.get(&[0]), ratio(-1, 2));
        assert_eq!(k.get(&[1]), ratio(1, 8));
        assert_eq!(k.get(&[2]), ratio(5, 64));
        assert_eq!(k.get(&[3]), ratio(15, 128));
        assert_eq!(k.get(&[4]), int(0));
        assert_eq!(k.get(&[-1]), int(0));
        let q = qn_sequence(2);
        assert_eq!(q.get(&[1]), ratio(3, 4));
        assert_eq!(q.get(&[2]), ratio(59, 32));
        let c = cnt_table(2, 3);
        assert_eq!(c.get(&[0, 7]), int(1));
        assert_eq!(c.get(&[1, 0]), int(2));
        assert_eq!(c.get(&[1, 1]), int(5));
        assert_eq!(c.get(&[2, 1]), int(60));
        let qnt = qnt_table(2, 3);
        assert_eq!(qnt.get(&[1, 0]), ratio(3, 4));
        assert_eq!(qnt.get(&[1, 1]), int(2));
        assert_eq!(qnt.get(&[2, 0]), ratio(59, 32));
        assert_eq!(qnt.get(&[0, 3]), int(1));
    }

    #[test]
    fn d_tables() {
        let (d, dpm) = dk_dpm_tables(3);
        assert_eq!(d.get(&[0]), int(1));
        assert_eq!(d.get(&[1]), ratio(1, 4));
        assert_eq!(d.get(&[2]), ratio(7, 32));
        assert_eq!(dpm.get(&[0, 0]), int(1));
        assert_eq!(dpm.get(&[1, 0]), ratio(1, 8));
        assert_eq!(dpm.get(&[1, 1]), ratio(1, 32));
    }

    #[test]
    fn walk_values() {
        let (lpm, labs) = lpm_labs_tables(3, 4).unwrap();
        assert_eq!(lpm.get(&[0, 0, 2]), int(1));
        assert_eq!(lpm.get(&[0, 0, 3]), int(0));
        assert_eq!(lpm.get(&[1, 0, 0]), ratio(1, 2));
        assert_eq!(labs.get(&[1, 0]), int(1));
        assert_eq!(labs.get(&[2, 1]), int(0));
    }

    #[test]
    fn limit_values() {
        assert_eq!(limiting_moment(LimitKind::Bea, &[1]).unwrap(), ExactRadical::new(ratio(1, 4), 1, 1));
        assert_eq!(limiting_moment(LimitKind::Bea, &[2]).unwrap(), ExactRadical::rational(ratio(5, 12)));
        assert_eq!(limiting_moment(LimitKind::Bea, &[0]).unwrap(), ExactRadical::one());
        assert_eq!(limiting_moment(LimitKind::Bma, &[1]).unwrap(), ExactRadical::new(ratio(3, 4), -1, 1));
        assert_eq!(limiting_moment(LimitKind::Rayleigh, &[2]).unwrap(), ExactRadical::rational(int(2)));
        assert_eq!(limiting_moment(LimitKind::WalkAbs, &[0, 4]).unwrap(), ExactRadical::rational(int(3)));
        assert_eq!(limiting_moment(LimitKind::WalkAbs, &[0, 2]).unwrap(), ExactRadical::one());
        assert_eq!(limiting_moment(LimitKind::MeanderJoint, &[0, 2]).unwrap(), ExactRadical::rational(int(2)));
        let a = limiting_moment(LimitKind::WalkAbs, &[1, 0]).unwrap();
        assert_eq!(a, ExactRadical::new(ratio(2, 3), 1, -1));
        let ap = limiting_moment(LimitKind::WalkSigned, &[1, 0, 0]).unwrap();
        assert_eq!(&ap * &ExactRadical::rational(int(2)), a);
    }

    #[test]
    fn order_errors() {
        let t = LimitTables::new(2, 2).unwrap();
        assert!(matches!(t.moment(LimitKind::Bea, &[3]), Err(Error::OrderOutOfRange(_))));
        assert!(matches!(t.moment(LimitKind::Bea, &[1, 1]), Err(Error::OrderOutOfRange(_))));
    }
}
