//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lattice_area::converge::{limit_report, signed_report, Order};
use lattice_area::enumerate::{bridge_distribution, exact_distribution, meander_altitude_counts, moment_dp};
use lattice_area::exact::{ratio, int};
use lattice_area::kernel::{boundary_partial_sums, branches_at, open_grid, solve_meander_gf, structural_constants, truncation_bound};
use lattice_area::limits::{cnt_table, dk_dpm_tables, kn_sequence, lpm_labs_tables, qn_sequence, qnt_table, walk_tables};
use lattice_area::polyomino::{cc_brute_oracle, cc_convergence, cc_enumerate, cc_structural_constants, fe_series};
use lattice_area::radical::gamma_half;
use lattice_area::steps::parse_step_set;
use lattice_area::{ExactRadical, LimitKind, LimitTables, MemoryBudget, PathClass, SpecFormat, StepSet, Tolerances};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

fn run(id: usize, title: &str, limit: Duration, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    out.check(elapsed <= limit, format!("runtime {:.1?} over {:.0?}", elapsed, limit));
    let pass = out.failures.is_empty();
    println!(
        "criterion {id:>2} {} {title} ({:.2?})",
        if pass { "PASS" } else { "FAIL" },
        elapsed
    );
    for n in &out.notes {
        println!("      {n}");
    }
    for f in out.failures.iter().take(10) {
        println!("      failed: {f}");
    }
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn rad(coeff: BigRational, half_pow2: i64, half_powpi: i64) -> ExactRadical {
    ExactRadical::new(coeff, half_pow2, half_powpi)
}

fn set(spec: &str) -> StepSet {
    parse_step_set(spec, SpecFormat::Compact).unwrap()
}

fn criterion_1(o: &mut Outcome) {
    let k = kn_sequence(3);
    let q = qn_sequence(2);
    let c = cnt_table(2, 1);
    let (d, dpm) = dk_dpm_tables(2);
    let (lpm, labs) = lpm_labs_tables(1, 0).unwrap();
    let cases = [
        ("K_0", k.get(&[0]), ratio(-1, 2)),
        ("K_1", k.get(&[1]), ratio(1, 8)),
        ("K_2", k.get(&[2]), ratio(5, 64)),
        ("K_3", k.get(&[3]), ratio(15, 128)),
        ("Q_1", q.get(&[1]), ratio(3, 4)),
        ("Q_2", q.get(&[2]), ratio(59, 32)),
        ("C_11", c.get(&[1, 1]), int(5)),
        ("C_21", c.get(&[2, 1]), int(60)),
        ("D_1", d.get(&[1]), ratio(1, 4)),
        ("D_2", d.get(&[2]), ratio(7, 32)),
        ("D±_11", dpm.get(&[1, 1]), ratio(1, 32)),
        ("L±_100", lpm.get(&[1, 0, 0]), ratio(1, 2)),
        ("L_10", labs.get(&[1, 0]), int(1)),
    ];
    for (name, got, want) in cases {
        o.check(got == want, format!("{name} = {got}, expected {want}"));
    }
}

fn criterion_2(o: &mut Outcome) {
    let n_max = 30usize;
    let k = kn_sequence(n_max);
    let q = qn_sequence(n_max);
    let c = cnt_table(n_max, 1);
    let eight = BigRational::from_integer(BigInt::from(8));
    for n in 1..=n_max as i64 {
        let want = num_traits::pow(eight.clone(), n as usize) * k.get(&[n]);
        o.check(c.get(&[n - 1, 1]) == want, format!("C_({},1) != 8^{n} K_{n}", n - 1));
    }
    let qnt = qnt_table(n_max, 2 * 6);
    for n in 0..=n_max as i64 {
        o.check(qnt.get(&[n, 0]) == q.get(&[n]), format!("Q_({n},0) != Q_{n}"));
    }
    for s in 0..=6i64 {
        o.check(qnt.get(&[0, 2 * s]).is_one(), format!("Q_(0,{}) != 1", 2 * s));
    }
    let (d, dpm) = dk_dpm_tables(n_max);
    for kk in 0..=n_max as i64 {
        let sum = (0..=kk).fold(BigRational::zero(), |acc, i| acc + dpm.get(&[kk - i, i]));
        o.check(d.get(&[kk]) == sum, format!("D_{kk} != sum of D±"));
    }
    let w = walk_tables(10, 6);
    for t in 0..=6i64 {
        let want = if t % 2 == 0 { BigRational::one() } else { BigRational::zero() };
        o.check(w.lpm.get(&[0, 0, t]) == want, format!("L±_(0,0,{t})"));
    }
    let mut compared = 0;
    for a in 0..=10i64 {
        for b in 0..=10 - a {
            for t in 0..=6i64 {
                compared += 1;
                o.check(
                    w.lpm.get(&[a, b, t]) == w.lpm_convolution.get(&[a, b, t]),
                    format!("L±_({a},{b},{t}) recursion != convolution"),
                );
            }
        }
    }
    for n in 0..=10i64 {
        for t in 0..=6i64 {
            o.check(
                w.labs.get(&[n, t]) == w.labs_convolution.get(&[n, t]),
                format!("L_({n},{t}) recursion != convolution"),
            );
        }
    }
    o.note(format!("{compared} signed entries compared between both routes"));
}

fn criterion_3(o: &mut Outcome) {
    let t = LimitTables::new(2, 10).unwrap();
    let m = |kind, orders: &[usize]| t.moment(kind, orders).unwrap();
    let cases = [
        ("E[BEA]", m(LimitKind::Bea, &[1]), rad(ratio(1, 2), -1, 1)),
        ("E[BEA^2]", m(LimitKind::Bea, &[2]), rad(ratio(5, 12), 0, 0)),
        ("E[BMA]", m(LimitKind::Bma, &[1]), rad(ratio(3, 8), 1, 1)),
        ("E[B(1)^2]", m(LimitKind::WalkAbs, &[0, 2]), ExactRadical::one()),
        ("E[B(1)^4]", m(LimitKind::WalkAbs, &[0, 4]), rad(int(3), 0, 0)),
        ("E[A]", m(LimitKind::WalkAbs, &[1, 0]), rad(ratio(2, 3), 1, -1)),
        ("E[A+]", m(LimitKind::WalkSigned, &[1, 0, 0]), rad(ratio(1, 3), 1, -1)),
        ("E[A-]", m(LimitKind::WalkSigned, &[0, 1, 0]), rad(ratio(1, 3), 1, -1)),
    ];
    for (name, got, want) in cases {
        o.check(got == want, format!("{name} = {got}, expected {want}"));
    }
    for tt in 0..=10usize {
        let want = ExactRadical::sqrt2_pow(tt as i64) * gamma_half(tt as i64 + 2).unwrap();
        let got = m(LimitKind::Rayleigh, &[tt]);
        o.check(got == want, format!("Rayleigh moment {tt}: {got} vs {want}"));
        // the zero-drift meander endpoint has the same moments
        o.check(m(LimitKind::MeanderJoint, &[0, tt]) == want, format!("M_(0,{tt}) is not the Rayleigh moment"));
    }
    let half = ExactRadical::rational(ratio(1, 2));
    o.check(&m(LimitKind::WalkAbs, &[1, 0]) * &half == m(LimitKind::WalkSigned, &[1, 0, 0]), "E[A+] != E[A]/2");
}

/// Every step sequence of length `m`, filtered by class, tallied by (area, final altitude).
type Brute = BTreeMap<(u64, i64), BigRational>;

/// Every step sequence of length `m`, walked depth first; one table per class in `PathClass::ALL` order.
fn brute_paths(s: &StepSet, m: usize) -> Vec<Brute> {
    fn walk(steps: &[(i64, BigRational)], left: usize, h: i64, area: u64, nonneg: bool, w: &BigRational, out: &mut [Brute]) {
        if left == 0 {
            for (class, table) in PathClass::ALL.iter().zip(out.iter_mut()) {
                if (!class.nonnegative() || nonneg) && (!class.ends_at_zero() || h == 0) {
                    *table.entry((area, h)).or_insert_with(BigRational::zero) += w;
                }
            }
            return;
        }
        for (step, sw) in steps {
            let next = h + step;
            walk(steps, left - 1, next, area + next.unsigned_abs(), nonneg && next >= 0, &(w * sw), out);
        }
    }
    let steps: Vec<(i64, BigRational)> = s.weights().iter().map(|(&k, v)| (k, v.clone())).collect();
    let mut out = vec![Brute::new(); PathClass::ALL.len()];
    walk(&steps, m, 0, 0, true, &BigRational::one(), &mut out);
    out
}

fn criterion_4(o: &mut Outcome) {
    let sets = [StepSet::bernoulli(), StepSet::motzkin(), StepSet::unit(&[-2, -1, 1]).unwrap()];
    let budget = MemoryBudget::DEFAULT;
    for s in &sets {
        for m in 0..=12 {
            for (class, b) in PathClass::ALL.into_iter().zip(brute_paths(s, m)) {
                let d = exact_distribution(s, class, m, budget).unwrap();
                o.check(d.table == b, format!("{} {} m={m}: distribution differs from brute force", s.to_compact(), class.name()));
            }
        }
        for class in PathClass::ALL {
            let table = moment_dp(s, class, 40, 2, 2, budget).unwrap();
            for m in 0..=40 {
                let d = exact_distribution(s, class, m, budget).unwrap();
                for n in 0..=2 {
                    for t in 0..=2 {
                        o.check(
                            *table.raw_sum(m, n, t) == d.raw_moment(n as u32, t as u32),
                            format!("{} {} m={m} (n,t)=({n},{t}): moment_dp differs", s.to_compact(), class.name()),
                        );
                    }
                }
            }
        }
    }
}

fn criterion_5(o: &mut Outcome) {
    let s = StepSet::bernoulli();
    let m_max = 40;
    let g0: Vec<BigRational> = meander_altitude_counts(&s, m_max, 0).into_iter().map(|row| row[0].clone()).collect();
    // H = G0/(2 - G0) with G0(0) = 1: H_m = G0_m + sum_{j>=1} G0_j H_{m-j}
    let mut h: Vec<BigRational> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut v = if m == 0 { BigRational::one() } else { g0[m].clone() };
        for j in 1..=m {
            v += &g0[j] * &h[m - j];
        }
        h.push(v);
    }
    for m in 0..=m_max {
        let b = bridge_distribution(&s, m, MemoryBudget::DEFAULT).unwrap().total();
        o.check(b == h[m], format!("m={m}: {b} bridges, series gives {}", h[m]));
    }
}

fn criterion_6(o: &mut Outcome) {
    let s = StepSet::bernoulli();
    let mut worst: f64 = 0.0;
    for z in open_grid(0.0, 0.5, 50) {
        let u1 = branches_at(&s, z).unwrap().u1();
        let closed = (1.0 - (1.0 - 4.0 * z * z).sqrt()) / (2.0 * z);
        worst = worst.max((u1 - closed).abs());
    }
    o.check(worst <= 1e-10, format!("u_1 deviation {worst:e}"));
    o.note(format!("largest u_1 deviation {worst:.2e}"));
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    for (s, tau, rho, beta) in [(StepSet::bernoulli(), 1.0, 0.5, r2), (StepSet::motzkin(), 1.0, 1.0 / 3.0, r3)] {
        let p = structural_constants::<f64>(&s).unwrap();
        for (name, got, want) in [("tau", p.tau, tau), ("rho", p.rho, rho), ("beta", p.beta, beta)] {
            o.check((got - want).abs() <= 1e-10, format!("{} {name} = {got}, expected {want}", s.to_compact()));
        }
    }
    let p = cc_structural_constants().unwrap();
    o.check((p.rho - (3.0 - 2.0 * r2)).abs() <= 1e-10, format!("polyomino rho = {}", p.rho));
    o.check((p.tau - (1.0 + r2)).abs() <= 1e-10, format!("polyomino tau = {}", p.tau));
}

fn criterion_7(o: &mut Outcome) {
    let s = StepSet::unit(&[-2, -1, 1]).unwrap();
    for z in [0.05, 0.10, 0.15] {
        let sol = solve_meander_gf(&s, z, &[]).unwrap();
        let partial = boundary_partial_sums(&s, z, 60);
        for k in 0..2 {
            let diff = (sol.g_values[k] - partial[k]).abs();
            let bound = truncation_bound(&s, z, 60, k).unwrap();
            // the bound covers truncation only; allow binary64 rounding on top of it
            let rounding = 64.0 * f64::EPSILON * partial[k].abs();
            o.check(diff <= bound + rounding, format!("z={z} G_{k}: |diff| {diff:e} above bound {bound:e}"));
            o.check(diff <= 1e-8, format!("z={z} G_{k}: |diff| {diff:e}"));
            o.note(format!("z={z:.2} G_{k}={:.15} |diff|={diff:.1e} bound={bound:.1e}", sol.g_values[k]));
        }
        o.check(sol.cross_check_ok, format!("z={z}: Cramer/Laplace/Vandermonde cross-check"));
    }
}

fn trend_line(r: &lattice_area::converge::ConvergenceReport, order: Order) -> String {
    let errs: Vec<String> = r
        .rows
        .iter()
        .filter(|row| row.order == order)
        .map(|row| format!("m={} {:.4}", row.m, row.rel_error))
        .collect();
    format!("{} {} {:?}: {}", r.step_set, r.class.name(), order, errs.join(", "))
}

fn criterion_8(o: &mut Outcome) {
    let tol = &Tolerances::embedded().converge;
    let budget = MemoryBudget::DEFAULT;

    let dyck = limit_report(&StepSet::bernoulli(), PathClass::Excursion, &[64, 128, 256, 512], &[(1, 0), (2, 0)], budget).unwrap();
    for (n, bound) in [(1, tol.excursion_first), (2, tol.excursion_second)] {
        let tr = dyck.trend(Order::Joint(n, 0)).unwrap();
        o.note(trend_line(&dyck, Order::Joint(n, 0)));
        o.check(tr.decreasing, format!("(a) Dyck n={n} errors not strictly decreasing"));
        o.check(tr.final_error < bound, format!("(a) Dyck n={n} final error {}", tr.final_error));
    }

    let joint = [(1, 0), (0, 1), (0, 2), (1, 1), (2, 0)];
    let motz = limit_report(&StepSet::motzkin(), PathClass::Meander, &[100, 200, 400], &joint, budget).unwrap();
    for &(n, t) in &joint {
        let tr = motz.trend(Order::Joint(n, t)).unwrap();
        o.note(trend_line(&motz, Order::Joint(n, t)));
        o.check(tr.decreasing, format!("(b) Motzkin ({n},{t}) errors not decreasing"));
        o.check(tr.final_error < tol.meander_joint, format!("(b) Motzkin ({n},{t}) final error {}", tr.final_error));
    }

    let negative = set("-1:2,0:1,1:1");
    let neg = limit_report(&negative, PathClass::Meander, &[512], &[(1, 0)], budget).unwrap();
    let e = neg.trend(Order::Joint(1, 0)).unwrap().final_error;
    o.note(trend_line(&neg, Order::Joint(1, 0)));
    o.check(e < tol.negative_drift, format!("(c) negative drift error {e}"));

    let positive = set("-1:1,0:1,1:2");
    let pos = limit_report(&positive, PathClass::Meander, &[400], &[(1, 0), (2, 0)], budget).unwrap();
    let mean = pos.row(400, Order::Joint(1, 0)).unwrap();
    let var = pos.row(400, Order::Joint(2, 0)).unwrap();
    o.note(format!("(d) mean ratio {:.5}, variance ratio {:.5} (limit 1/3)", mean.rescaled, var.rescaled));
    o.check(mean.rel_error < tol.positive_mean, format!("(d) mean ratio {}", mean.rescaled));
    o.check(var.rel_error < tol.positive_variance, format!("(d) variance ratio {}", var.rescaled));

    for s in [negative, StepSet::motzkin(), positive] {
        let r = limit_report(&s, PathClass::Excursion, &[256], &[(1, 0)], budget).unwrap();
        let e = r.rows[0].rel_error;
        o.note(format!("(e) {} excursion m=256 error {e:.4}", s.to_compact()));
        o.check(e < tol.drift_independence, format!("(e) {} excursion error {e}", s.to_compact()));
    }
}

fn criterion_9(o: &mut Outcome) {
    let tol = Tolerances::embedded().converge.signed;
    let mut orders = Vec::new();
    for k in 0..=2 {
        for l in 0..=2 - k {
            for t in 0..=2 {
                orders.push(Order::Signed(k, l, t));
            }
        }
    }
    let r = signed_report(&[100, 200, 400], &orders, MemoryBudget::DEFAULT).unwrap();
    for &ord in &orders {
        let tr = r.trend(ord).unwrap();
        o.note(trend_line(&r, ord));
        o.check(tr.decreasing, format!("{ord:?} errors not decreasing"));
        o.check(tr.final_error < tol, format!("{ord:?} final error {}", tr.final_error));
    }
}

fn criterion_10(o: &mut Outcome) {
    let budget = MemoryBudget::DEFAULT;
    let brute = cc_brute_oracle(12);
    let cc = cc_enumerate(12, budget).unwrap().by_hp_area();
    let valid = brute.valid_hp_max().min(7);
    for ((hp, area), v) in &cc {
        if *hp <= valid {
            o.check(*v == BigInt::from(brute.count(*hp, *area)), format!("hp={hp} area={area}: brute force differs"));
        }
    }
    for (&(hp, area), &v) in &brute.column_convex {
        if hp <= valid {
            o.check(cc.contains_key(&(hp, area)) || v == 0, format!("hp={hp} area={area} missing from enumeration"));
        }
    }
    let mut fe: BTreeMap<(u64, u64), BigInt> = BTreeMap::new();
    for ((hp, area, _), v) in fe_series(12).unwrap() {
        *fe.entry((hp, area)).or_insert_with(BigInt::zero) += v;
    }
    fe.retain(|_, v| !v.is_zero());
    o.check(fe == cc, "functional-equation series differs from the column enumeration for hp <= 12");

    let conv = cc_convergence(&[20, 40, 60], budget).unwrap();
    let errs: Vec<String> = conv.rows.iter().map(|r| format!("hp={} {:.4}", r.hp, r.rel_error)).collect();
    o.note(format!("rescaled mean area error: {}", errs.join(", ")));
    o.check(conv.decreasing, "rescaled mean area error not decreasing");
}

fn main() -> ExitCode {
    let results = [
        run(1, "exact recursion tables", secs(1), criterion_1),
        run(2, "identity suite", secs(5), criterion_2),
        run(3, "exact limiting moments", secs(1), criterion_3),
        run(4, "oracle equivalence", secs(60), criterion_4),
        run(5, "bridge identity", secs(10), criterion_5),
        run(6, "kernel numerics", secs(5), criterion_6),
        run(7, "determinantal solver against DP", secs(30), criterion_7),
        run(8, "area limit trends", secs(600), criterion_8),
        run(9, "signed-area trends", secs(300), criterion_9),
        run(10, "polyomino suite", secs(600), criterion_10),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
