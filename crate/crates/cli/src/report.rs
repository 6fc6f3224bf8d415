//! `report all`: every data series plus a manifest of acceptance checks.
//!
//! Files are written in a fixed order with fixed names so two runs with the
//! same seed and flags produce byte-identical directories.

use crate::commands::{self, CollectiveArg, GlobalOpts, ModelArg};
use crate::output::{write_table, Format, Table};
use crate::CliError;
use num_complex::Complex64 as C64;
use qcrypto::auth::{self, FakeStateParams, Protocol};
use qcrypto::channels::{self, NoiseFamily, NoiseModel};
use qcrypto::dl04game::{
    self, AttackKind, Game, GameAnalysis, PayoffWeights, REFERENCE_EQUILIBRIA,
};
use qcrypto::keyagree::{self, DwMode, Variant};
use qcrypto::keydist::{self, DwBound, ErrorRate, EveStateForm, PnsProtocol, RateCurve, SiftProtocol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Number, Value};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::path::{Path, PathBuf};

/// Random fake states drawn per fake-state search.
const FAKE_SEARCH_SAMPLES: usize = 2000;

/// Seed streams; each consumer derives its own generator from the master seed.
const STREAM_FAKE_SINGLE: u64 = 1;
const STREAM_FAKE_ENTANGLED: u64 = 2;
const STREAM_FAKE_P24: u64 = 3;
const STREAM_QKA_FORGED: u64 = 4;
const STREAM_SIFTING: u64 = 5;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// One acceptance check: passes when `|value − target| ≤ tol`.
#[derive(Debug, Clone)]
pub struct Check {
    pub criterion: u8,
    pub name: &'static str,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
}

impl Check {
    fn new(criterion: u8, name: &'static str, value: f64, target: f64, tol: f64) -> Self {
        Self { criterion, name, value, target, tol }
    }

    pub fn pass(&self) -> bool {
        (self.value - self.target).abs() <= self.tol
    }
}

/// A discrepancy the report records without asserting.
#[derive(Debug, Clone)]
struct Flag {
    name: &'static str,
    value: f64,
    note: &'static str,
}

struct Report {
    dir: PathBuf,
    format: Format,
    files: Vec<(String, &'static [&'static str])>,
    checks: Vec<Check>,
    flags: Vec<Flag>,
}

impl Report {
    fn write(&mut self, name: &str, anchors: &'static [&'static str], table: &Table) -> Result<(), CliError> {
        let file = write_table(&self.dir, name, table, self.format)?;
        self.files.push((file, anchors));
        Ok(())
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }
}

fn num(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn report_all(g: &GlobalOpts) -> Result<(), CliError> {
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("report"));
    std::fs::create_dir_all(&dir)?;
    let mut r = Report { dir, format: g.format, files: Vec::new(), checks: Vec::new(), flags: Vec::new() };
    auth_section(&mut r, g)?;
    qkd_section(&mut r, g)?;
    qka_section(&mut r, g)?;
    noise_section(&mut r)?;
    dl04_section(&mut r, g)?;
    let misses = r.checks.iter().filter(|c| !c.pass()).count();
    write_manifest(&r, g.seed, &r.dir)?;
    if misses > 0 {
        Err(CliError::AcceptanceMiss(misses))
    } else {
        Ok(())
    }
}

fn write_manifest(r: &Report, seed: u64, dir: &Path) -> Result<(), CliError> {
    let files: Vec<Value> = r.files.iter().map(|(f, a)| json!({ "file": f, "anchors": a })).collect();
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "criterion": c.criterion,
                "name": c.name,
                "value": num(c.value),
                "target": num(c.target),
                "tol": num(c.tol),
                "pass": c.pass(),
            })
        })
        .collect();
    let flags: Vec<Value> =
        r.flags.iter().map(|f| json!({ "name": f.name, "value": num(f.value), "note": f.note })).collect();
    let manifest = json!({
        "seed": seed,
        "files": files,
        "checks": checks,
        "flags": flags,
        "all_pass": r.checks.iter().all(Check::pass),
    });
    let mut s = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    s.push('\n');
    std::fs::write(dir.join("manifest.json"), s)?;
    Ok(())
}

// ---- fake-state searches ----

fn random_unit(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| {
                let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
                C64::new(rng.random_range(-1.0..1.0), im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Orthonormal pair `(u, w)` by Gram-Schmidt on two random vectors.
fn random_orthonormal_pair(rng: &mut ChaCha8Rng) -> ([C64; 4], [C64; 4]) {
    loop {
        let u = random_unit(rng, 4, true);
        let v = random_unit(rng, 4, true);
        let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let w: Vec<C64> = v.iter().zip(&u).map(|(b, a)| b - overlap * a).collect();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let w: Vec<C64> = w.into_iter().map(|z| z / norm).collect();
            return (to4(&u), to4(&w));
        }
    }
}

fn to4(v: &[C64]) -> [C64; 4] {
    [v[0], v[1], v[2], v[3]]
}

fn basis4(i: usize) -> [C64; 4] {
    let mut a = [C64::new(0.0, 0.0); 4];
    a[i] = C64::new(1.0, 0.0);
    a
}

/// Key-averaged probability that Eve passes protocol 2.4.
pub fn p24_average_pass(params: &FakeStateParams) -> Result<f64, CliError> {
    let mut total = 0.0;
    for k in 0..4u8 {
        total += auth::p24_oracle_pass(params, k)?;
    }
    Ok(total / 4.0)
}

/// Seeded searches over fake states. Each row is one candidate; the search
/// also covers the computational-basis corners where the minima sit.
struct FakeSearch {
    single_min: f64,
    entangled_min: f64,
    p24_max_average: f64,
    p24_max_key10: f64,
    table: Table,
}

fn fake_search(seed: u64) -> Result<FakeSearch, CliError> {
    let mut table = Table::new(&["attack", "sample", "detection_oracle", "detection_closed_form", "pass_printed"]);
    let mut single_min = f64::INFINITY;
    let mut rng = stream(seed, STREAM_FAKE_SINGLE);
    let corners = [(1.0, 0.0, 1.0, 0.0), (0.0, 1.0, 0.0, 1.0), (FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2)];
    for i in 0..FAKE_SEARCH_SAMPLES + corners.len() {
        let params = match corners.get(i) {
            Some(&(a, b, c, d)) => FakeStateParams::single(a, b, c, d),
            None => {
                let x = random_unit(&mut rng, 2, true);
                let y = random_unit(&mut rng, 2, true);
                FakeStateParams::Single { a: x[0], b: x[1], c: y[0], d: y[1] }
            }
        };
        let rep = auth::fake_state_detection(&params)?;
        single_min = single_min.min(rep.oracle);
        table.push(vec!["single".into(), i.into(), rep.oracle.into(), rep.closed_form.into(), None::<f64>.into()]);
    }

    let mut entangled_min = f64::INFINITY;
    let mut rng = stream(seed, STREAM_FAKE_ENTANGLED);
    for i in 0..FAKE_SEARCH_SAMPLES + 4 {
        let amps = if i < 4 { basis4(i) } else { to4(&random_unit(&mut rng, 4, true)) };
        let rep = auth::fake_state_detection(&FakeStateParams::Entangled { amps })?;
        entangled_min = entangled_min.min(rep.oracle);
        table.push(vec!["entangled".into(), i.into(), rep.oracle.into(), rep.closed_form.into(), None::<f64>.into()]);
    }

    let mut p24_max_average: f64 = 0.0;
    let mut p24_max_key10: f64 = 0.0;
    let mut rng = stream(seed, STREAM_FAKE_P24);
    // The printed pass probability peaks when |b₀|²+|c₀|² = 1.
    let corner = FakeStateParams::Entangling { on_one: basis4(1), on_zero: basis4(0) };
    for i in 0..=FAKE_SEARCH_SAMPLES {
        let params = if i == 0 {
            corner
        } else {
            let (on_one, on_zero) = random_orthonormal_pair(&mut rng);
            FakeStateParams::Entangling { on_one, on_zero }
        };
        let rep = auth::fake_state_detection(&params)?;
        let avg = p24_average_pass(&params)?;
        p24_max_average = p24_max_average.max(avg);
        p24_max_key10 = p24_max_key10.max(rep.oracle_pass());
        table.push(vec![
            "entangling".into(),
            i.into(),
            (1.0 - avg).into(),
            rep.closed_form.into(),
            (1.0 - rep.printed).into(),
        ]);
    }
    Ok(FakeSearch { single_min, entangled_min, p24_max_average, p24_max_key10, table })
}

/// Detection probabilities at a few named fake states.
pub fn fake_state_reference() -> Result<Table, CliError> {
    let h = FRAC_1_SQRT_2;
    let bell_phi = [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
    let cases = [
        ("single |0>|0>", FakeStateParams::single(1.0, 0.0, 1.0, 0.0)),
        ("single |+>|+>", FakeStateParams::single(h, h, h, h)),
        ("entangled |00>", FakeStateParams::Entangled { amps: basis4(0) }),
        ("entangled phi+", FakeStateParams::Entangled { amps: bell_phi }),
    ];
    let mut t = Table::new(&["fake", "closed_form", "oracle"]);
    for (label, params) in cases {
        let rep = auth::fake_state_detection(&params)?;
        t.push(vec![label.into(), rep.closed_form.into(), rep.oracle.into()]);
    }
    Ok(t)
}

/// Detection probability of `count` random forged pairs in the key
/// agreement protocol.
pub fn qka_impersonation(count: usize, seed: u64) -> Result<Table, CliError> {
    let mut rng = stream(seed, STREAM_QKA_FORGED);
    let mut t = Table::new(&["sample", "p_d"]);
    for i in 0..count {
        let amps = to4(&random_unit(&mut rng, 4, true));
        t.push(vec![i.into(), keyagree::impersonation_detection(amps)?.into()]);
    }
    Ok(t)
}

fn column(t: &Table, name: &str) -> Vec<f64> {
    let i = t.columns.iter().position(|c| c == name).expect("known column");
    t.rows
        .iter()
        .map(|row| match row[i] {
            crate::output::Cell::Num(x) => x,
            _ => f64::NAN,
        })
        .collect()
}

// ---- sections ----

fn auth_section(r: &mut Report, g: &GlobalOpts) -> Result<(), CliError> {
    let detect = commands::auth_detect_curve(12);
    r.write("auth_detect", &["detect_probability"], &detect)?;
    let formula_err = (1..=12)
        .map(|n| (auth::detect_probability(n) - (1.0 - 0.25f64.powi(n as i32))).abs())
        .fold(0.0, f64::max);
    r.check(Check::new(1, "detect_probability matches 1-(1/4)^n, n=1..12", formula_err, 0.0, 0.0));

    let imp = auth::impersonation_trials(Protocol::P21, 6, g.rounds, g.seed)?;
    let target = auth::detect_probability(6);
    let sigma = (target * (1.0 - target) / g.rounds as f64).sqrt();
    r.write(
        "auth_impersonation",
        &["detect_probability", "impersonation_trials"],
        &commands::auth_impersonation(Protocol::P21, 6, g.rounds, g.seed)?,
    )?;
    r.check(Check::new(1, "impersonation rejection rate at n=6 (3 sigma)", imp.rejection_rate(), 0.999756, 3.0 * sigma));

    r.write("auth_measure_resend", &["measure_resend_analysis", "holevo"], &commands::auth_measure_resend()?)?;
    let p21 = auth::measure_resend_analysis(Protocol::P21)?;
    let p22 = auth::measure_resend_analysis(Protocol::P22)?;
    r.check(Check::new(2, "protocol 2.1 I(A:B)", p21.i_ab, 1.0, 1e-5));
    r.check(Check::new(2, "protocol 2.1 I(A:E)", p21.i_ae, 0.311278, 1e-5));
    r.check(Check::new(2, "protocol 2.1 Holevo bound", p21.holevo_cap, 0.600876, 1e-5));
    r.check(Check::new(2, "protocol 2.2 I(A:B)", p22.i_ab, 1.18872, 1e-5));
    r.check(Check::new(2, "protocol 2.2 I(A:E)", p22.i_ae, 0.5, 1e-5));
    r.check(Check::new(2, "protocol 2.2 Holevo bound", p22.holevo_cap, 1.0, 1e-5));

    let fs = fake_search(g.seed)?;
    r.write("auth_fake_state", &["fake_state_detection", "p24_oracle_pass"], &fs.table)?;
    r.check(Check::new(3, "single-qubit fake minimum detection", fs.single_min, 0.75, 1e-10));
    r.check(Check::new(3, "entangled fake minimum detection", fs.entangled_min, 0.5, 1e-10));
    r.check(Check::new(3, "protocol 2.4 maximum key-averaged Eve pass", fs.p24_max_average, 0.375, 1e-10));
    r.flags.push(Flag {
        name: "protocol 2.4 maximum Eve pass for key 10",
        value: fs.p24_max_key10,
        note: "state-vector oracle for a single key; the published closed form depends on b0 and c0 only",
    });

    let mut tables = Table::new(&["protocol", "cases", "outcomes", "violations", "table_mismatches"]);
    let mut bad = 0;
    for (label, tc) in [("2.3", auth::verify_p23_tables()?), ("2.4", auth::verify_p24_tables()?)] {
        bad += tc.violations + tc.table_mismatches;
        tables.push(vec![
            label.into(),
            tc.cases.into(),
            tc.outcomes.into(),
            tc.violations.into(),
            tc.table_mismatches.into(),
        ]);
    }
    r.write("auth_outcome_tables", &["p23_outcomes", "p24_outcomes"], &tables)?;
    r.check(Check::new(4, "authentication outcome tables: uncovered outcomes", bad as f64, 0.0, 0.0));
    Ok(())
}

fn qkd_section(r: &mut Report, g: &GlobalOpts) -> Result<(), CliError> {
    r.write("qkd_rates", &["key_rate", "threshold"], &commands::qkd_rate_table(&RateCurve::ALL, 0.005)?)?;
    let targets = [0.0314, 0.0617, 0.0316, 0.15];
    let names = ["sb1 threshold", "sb1_y threshold", "sb2 threshold", "sb2_x threshold"];
    let mut roots = Table::new(&["curve", "root"]);
    for ((c, t), name) in RateCurve::ALL.into_iter().zip(targets).zip(names) {
        let root = keydist::threshold(c)?.value();
        roots.push(vec![c.label().into(), root.into()]);
        r.check(Check::new(5, name, root, t, 5e-4));
    }

    let bounds = [
        ("dw_lower", DwBound::Lower, Some(0.124)),
        ("dw_upper", DwBound::Upper(EveStateForm::Normalized), Some(0.114)),
        ("dw_upper_printed", DwBound::Upper(EveStateForm::Printed), None),
    ];
    let mut dw = Table::new(&["e", "lower_rate", "lower_q", "upper_rate", "upper_q"]);
    for i in 0..=40 {
        let e = ErrorRate::new(i as f64 * 0.005)?;
        let (ql, rl) = keydist::optimized_rate(DwBound::Lower, e)?;
        let (qu, ru) = keydist::optimized_rate(DwBound::Upper(EveStateForm::Normalized), e)?;
        dw.push(vec![e.value().into(), rl.into(), ql.into(), ru.into(), qu.into()]);
    }
    r.write("qkd_dw_rates", &["dw_bounds", "optimized_rate"], &dw)?;
    for (label, b, target) in bounds {
        let root = b.threshold()?.value();
        roots.push(vec![label.into(), root.into()]);
        match (label, target) {
            ("dw_lower", Some(t)) => r.check(Check::new(5, "DW lower-bound threshold", root, t, 2e-3)),
            (_, Some(t)) => r.check(Check::new(5, "DW upper-bound threshold", root, t, 2e-3)),
            (_, None) => r.flags.push(Flag {
                name: "DW upper-bound threshold, printed Eve states",
                value: root,
                note: "unnormalized states as printed; the checked bound normalizes them",
            }),
        }
    }
    r.write("qkd_thresholds", &["threshold", "dw_threshold"], &roots)?;

    let pns = commands::qkd_pns_table(&[PnsProtocol::P1, PnsProtocol::P2], None, 0.25)?;
    r.write("qkd_pns", &["pns_critical", "eve_information"], &pns)?;
    let p1 = keydist::pns_critical(PnsProtocol::P1, PnsProtocol::P1.default_mean_photon(), 0.25)?;
    let p2 = keydist::pns_critical(PnsProtocol::P2, PnsProtocol::P2.default_mean_photon(), 0.25)?;
    r.check(Check::new(6, "PNS critical attenuation, protocol 1 (dB)", p1.critical_db, 15.05, 0.1));
    r.check(Check::new(6, "PNS critical distance, protocol 1 (km)", p1.critical_km, 60.2, 0.5));
    r.check(Check::new(6, "IRUD critical attenuation, protocol 2 (dB)", p2.critical_db, 23.75, 0.5));
    r.check(Check::new(6, "IRUD critical distance, protocol 2 (km)", p2.critical_km, 95.0, 2.0));

    r.write("qkd_efficiency", &["cabello_efficiency", "protocol32_bs"], &commands::qkd_efficiency_table()?)?;
    let eff = commands::efficiency_inputs()?;
    let names = ["efficiency, protocol 3.1", "efficiency, protocol 3.2", "efficiency, SARG04"];
    for ((_, bs, qt, bt), (name, target)) in eff.iter().zip(names.into_iter().zip([0.2069, 0.192, 0.125])) {
        r.check(Check::new(7, name, keydist::cabello_efficiency(*bs, *qt, *bt)?, target, 1e-4));
    }
    let (_, bs, qt, bt) = eff[3];
    r.flags.push(Flag {
        name: "efficiency, protocol 3.2 with full-precision b_s",
        value: keydist::cabello_efficiency(bs, qt, bt)?,
        note: "the checked value uses b_s rounded to 0.72 as published",
    });
    r.check(Check::new(7, "protocol 3.2 b_s", keydist::protocol32_bs()?, 0.72, 5e-3));

    let mut sift = Table::new(&["protocol", "row", "expected", "observed"]);
    for p in [SiftProtocol::P31, SiftProtocol::P32] {
        let mut rng = stream(g.seed, STREAM_SIFTING);
        let stats = keydist::simulate_rounds(p, g.rounds as u64, &mut rng);
        let freq = stats.row_frequencies();
        for (i, row) in keydist::HONEST_TABLE.iter().enumerate() {
            sift.push(vec![
                p.label().into(),
                (i + 1).into(),
                (1.0 / f64::from(row.den)).into(),
                freq.get(&i).copied().unwrap_or(0.0).into(),
            ]);
        }
    }
    r.write("qkd_sifting", &["sift", "simulate_rounds"], &sift)?;
    Ok(())
}

fn qka_section(r: &mut Report, g: &GlobalOpts) -> Result<(), CliError> {
    let mut rows = Table::new(&["variant", "k_c", "k_a", "k_b", "bob_bit", "r_a", "r_b", "key", "probability", "in_table"]);
    let mut wrong = 0usize;
    for variant in [Variant::Controlled, Variant::TwoParty] {
        let label = match variant {
            Variant::Controlled => "controlled",
            Variant::TwoParty => "two_party",
        };
        let printed = keyagree::table(variant);
        for (round, p) in keyagree::enumerate_rounds(variant)? {
            let key = round.row_key();
            let found = printed.iter().any(|t| {
                (t.k_c, t.k_a, t.k_b, t.r_a, t.r_b, t.key) == (key.k_c, key.k_a, key.k_b, key.r_a, key.r_b, round.key)
            });
            // Each party's key bit comes from its own outcome and the inferred one.
            let alice = keyagree::alice_infers(variant, round.k_c, round.k_a, round.k_b, round.r_a)
                .map(|r_b| keyagree::parity(round.r_a ^ r_b));
            let bob = keyagree::bob_infers(variant, round.k_c, round.k_a, round.r_b)
                .map(|r_a| keyagree::parity(r_a ^ round.r_b));
            if !found || alice != Some(round.key) || bob != Some(round.key) {
                wrong += 1;
            }
            rows.push(vec![
                label.into(),
                round.k_c.into(),
                round.k_a.into(),
                round.k_b.into(),
                round.bob_bit.into(),
                round.r_a.into(),
                round.r_b.into(),
                round.key.into(),
                p.into(),
                found.into(),
            ]);
        }
    }
    r.write("qka_outcome_tables", &["enumerate_rounds", "outcome_table"], &rows)?;
    r.check(Check::new(4, "key agreement tables: uncovered branches", wrong as f64, 0.0, 0.0));
    r.check(Check::new(8, "key agreement correctness: disagreeing branches", wrong as f64, 0.0, 0.0));

    let forged = qka_impersonation(100, g.seed)?;
    let dev = column(&forged, "p_d").iter().map(|p| (p - 0.5).abs()).fold(0.0, f64::max);
    r.write("qka_impersonation", &["impersonation_detection"], &forged)?;
    r.check(Check::new(8, "forged-pair detection, max |P_d - 1/2| over 100 states", dev, 0.0, 1e-10));

    let mut coll = Table::new(&["alpha_deg", "p_d", "d_printed", "d_oracle", "eve_information", "success_n6"]);
    for deg in (0..=90).step_by(5) {
        let a = f64::from(deg).to_radians();
        let s = keyagree::collective_attack_stats(&keyagree::AncillaParams::balanced(a), 6)?;
        coll.push(vec![
            f64::from(deg).into(),
            s.p_d.into(),
            s.d_printed.into(),
            s.d_oracle.into(),
            s.eve_information.into(),
            s.success.into(),
        ]);
    }
    r.write("qka_collective", &["collective_attack_stats", "success_probability"], &coll)?;
    r.check(Check::new(8, "success probability Pr(6, 0.25)", keyagree::success_probability(6, 0.25)?, 2.629e-3, 1e-6));

    r.write("qka_dw_bound", &["dw_rate", "dw_tolerable_qber"], &commands::qka_bound_curve()?)?;
    let root = keyagree::dw_tolerable_qber(FRAC_PI_2, DwMode::Reproduction)?;
    r.check(Check::new(8, "DW tolerable error rate at alpha=pi/2", root, 0.27, 5e-3));
    Ok(())
}

fn noise_section(r: &mut Report) -> Result<(), CliError> {
    const FIDELITY_ANCHORS: &[&str] = &["kraus_ops", "cqka_avg_fidelity"];
    for (name, model) in [
        ("noise_fidelity_ad", ModelArg::Ad),
        ("noise_fidelity_pd", ModelArg::Pd),
        ("noise_fidelity_nmdph", ModelArg::Nmdph),
        ("noise_fidelity_nmdpo", ModelArg::Nmdpo),
    ] {
        let t = commands::noise_fidelity_table(commands::noise_family(model, 0.5), 0.01)?;
        let oracle = column(&t, "oracle");
        let x = column(&t, "x");
        match model {
            ModelArg::Pd => {
                let err = x.iter().zip(&oracle).map(|(x, f)| (f - (1.0 - x / 2.0)).abs()).fold(0.0, f64::max);
                r.check(Check::new(9, "phase damping fidelity equals 1 - eta/2", err, 0.0, 1e-12));
            }
            ModelArg::Ad | ModelArg::Nmdpo => {
                let defined: Vec<f64> = oracle.iter().copied().filter(|f| f.is_finite()).collect();
                let rises = defined.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
                let (check_name, end_name) = if model == ModelArg::Ad {
                    ("amplitude damping fidelity: increasing steps", "amplitude damping fidelity at eta=0")
                } else {
                    ("non-Markovian depolarizing fidelity: increasing steps", "non-Markovian depolarizing fidelity at p=0")
                };
                r.check(Check::new(9, check_name, rises as f64, 0.0, 0.0));
                r.check(Check::new(9, end_name, defined[0], 1.0, 1e-12));
                let disc = column(&t, "discrepancy").into_iter().filter(|d| d.is_finite()).fold(0.0, f64::max);
                r.flags.push(Flag {
                    name: if model == ModelArg::Ad {
                        "amplitude damping: max |oracle - printed|"
                    } else {
                        "non-Markovian depolarizing: max |oracle - printed|"
                    },
                    value: disc,
                    note: "published closed form fails endpoint sanity; the oracle curve is shipped",
                });
            }
            ModelArg::Nmdph => {}
        }
        r.write(name, FIDELITY_ANCHORS, &t)?;
    }
    let f0 = channels::cqka_avg_fidelity(NoiseModel::NonMarkovianDephasing { alpha: 0.5, p: 0.0 })?.oracle;
    let fh = channels::cqka_avg_fidelity(NoiseModel::NonMarkovianDephasing { alpha: 0.0, p: 0.5 })?.oracle;
    r.check(Check::new(9, "non-Markovian dephasing fidelity at p=0", f0, 1.0, 1e-12));
    r.check(Check::new(9, "non-Markovian dephasing fidelity at p=1/2, alpha=0", fh, 0.5, 1e-12));
    // Keeps the memoryless endpoint curve alongside the alpha=0.5 default.
    let memoryless = commands::noise_fidelity_table(NoiseFamily::NonMarkovianDephasing { alpha: 0.0 }, 0.01)?;
    r.write("noise_fidelity_nmdph_memoryless", FIDELITY_ANCHORS, &memoryless)?;

    for (name, kind) in [("noise_collective_dephasing", CollectiveArg::Dephasing), ("noise_collective_rotation", CollectiveArg::Rotation)] {
        r.write(name, &["collective_error_probability"], &commands::noise_collective_table(kind, 1.0)?)?;
    }
    Ok(())
}

fn dl04_section(r: &mut Report, g: &GlobalOpts) -> Result<(), CliError> {
    let mut ver = Table::new(&["attack", "grid", "max_residual", "max_oracle_qber"]);
    let mut worst: f64 = 0.0;
    for a in [AttackKind::E1, AttackKind::E2, AttackKind::E3] {
        let v = dl04game::verify_attack_states(a, 21)?;
        worst = worst.max(v.max_residual);
        ver.push(vec![a.label().into(), v.grid.into(), v.max_residual.into(), v.max_oracle_qber.into()]);
    }
    r.write("dl04_attack_verifier", &["oracle_distribution", "joint_distribution"], &ver)?;
    r.check(Check::new(10, "attack-state verifier max residual", worst, 0.0, 1e-9));

    let w = PayoffWeights::default();
    let mut sum_err: f64 = 0.0;
    for a in AttackKind::ALL {
        for i in 0..=20 {
            for j in 0..=20 {
                let pay = dl04game::payoff(a, i as f64 / 20.0, j as f64 / 20.0, &w)?;
                sum_err = sum_err.max((pay.alice + pay.eve - 0.25).abs());
            }
        }
    }
    r.check(Check::new(10, "P_A + P_E = 1/4, max deviation", sum_err, 0.0, 1e-12));

    let mut refs = Table::new(&["game", "p", "q", "r", "qber_table", "qber", "residual_alice", "residual_bob", "residual_eve"]);
    let (mut max_res, mut max_dq): (f64, f64) = (0.0, 0.0);
    for rp in REFERENCE_EQUILIBRIA.iter() {
        let s = rp.profile();
        let res = dl04game::residuals(&rp.game, s, &w)?;
        let q = rp.game.expected_qber(s);
        max_res = res.iter().fold(max_res, |m, x| m.max(x.abs()));
        max_dq = max_dq.max((q - rp.qber).abs());
        refs.push(vec![
            rp.game.label().into(),
            rp.p.into(),
            rp.q.into(),
            rp.r.into(),
            rp.qber.into(),
            q.into(),
            res[0].into(),
            res[1].into(),
            res[2].into(),
        ]);
    }
    r.write("dl04_reference_points", &["residuals", "expected_qber"], &refs)?;
    r.check(Check::new(10, "published equilibria: max indifference residual", max_res, 0.0, 0.02));
    r.check(Check::new(10, "published equilibria: max error-rate deviation", max_dq, 0.0, 5e-4));

    let params = g.search_params();
    let mut analyses = Vec::new();
    for game in Game::REFERENCE {
        let a = GameAnalysis::run(game, params, &w)?;
        let name = format!("dl04_nash_{}", game.label().to_ascii_lowercase().replace('-', "_"));
        r.write(&name, &["find_equilibria", "best_response"], &commands::nash_table(&a.equilibria))?;
        analyses.push(a);
    }
    let targets = [0.610303, 0.152451, 0.143882, 0.323478];
    let names = [
        "E1-E2 minimum equilibrium error rate",
        "E1-E3 minimum equilibrium error rate",
        "E2-E3 minimum equilibrium error rate",
        "E1-E4 minimum equilibrium error rate",
    ];
    for ((a, t), name) in analyses.iter().zip(targets).zip(names) {
        r.check(Check::new(10, name, a.min_qber().unwrap_or(f64::NAN), t, 5e-3));
    }
    r.write("dl04_bound", &["secure_bound", "find_equilibria"], &commands::bound_table(&analyses)?)?;
    Ok(())
}
