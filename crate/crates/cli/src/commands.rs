//! Subcommands. Each builder returns a [`Table`]; [`execute`] prints it or
//! writes it under `--out`.

use crate::output::{Cell, Format, Table};
use crate::{report, CliError, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qcrypto::auth::{self, Adversary, KeySequence, Protocol, SimConfig};
use qcrypto::channels::{self, CollectiveNoise, NoiseFamily};
use qcrypto::dl04game::{
    self, AttackKind, EquilibriumPoint, Game, GameAnalysis, PayoffWeights, SearchParams, StrategyProfile,
};
use qcrypto::keyagree::{self, AncillaParams, Choices, DwMode, Variant};
use qcrypto::keydist::{self, DwBound, EveStateForm, PnsProtocol, RateCurve, SiftProtocol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_rounds(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|e| format!("invalid count {s:?}: {e}"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e12 {
        Ok(v as usize)
    } else {
        Err(format!("count {s:?} must be a positive integer"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "qcrypto", version, about = "Regenerate protocol simulations, security bounds and equilibrium tables")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Master seed for every Monte-Carlo draw; accepts 0x-prefixed hex.
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0xD104")]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write artifacts into this directory instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Monte-Carlo rounds or trials; accepts forms like 1e5.
    #[arg(long, global = true, value_parser = parse_rounds, default_value = "100000")]
    pub rounds: usize,
    /// Lattice points per axis for equilibrium scans.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Overlap angle in degrees.
    #[arg(long, global = true, conflicts_with = "alpha_rad")]
    pub alpha_deg: Option<f64>,
    /// Overlap angle in radians.
    #[arg(long, global = true)]
    pub alpha_rad: Option<f64>,
    /// Tolerance override: the accepted error rate for authentication
    /// sessions, the refinement target for equilibrium search.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

impl Default for GlobalOpts {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            format: Format::Csv,
            out: None,
            rounds: 100_000,
            grid: None,
            alpha_deg: None,
            alpha_rad: None,
            tol: None,
        }
    }
}

impl GlobalOpts {
    pub fn alpha(&self) -> Option<f64> {
        self.alpha_rad.or(self.alpha_deg.map(f64::to_radians))
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(SearchParams::default().grid_n)
    }

    pub fn search_params(&self) -> SearchParams {
        let mut p = SearchParams::with_grid(self.grid());
        if let Some(t) = self.tol {
            p.refine_tol = t;
        }
        p
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Identity authentication protocols.
    #[command(subcommand)]
    Auth(AuthCmd),
    /// Two-way four-state key distribution.
    #[command(subcommand)]
    Qkd(QkdCmd),
    /// Controlled key agreement.
    #[command(subcommand)]
    Qka(QkaCmd),
    /// DL04 attack game.
    #[command(subcommand)]
    Dl04(Dl04Cmd),
    /// Noise channels.
    #[command(subcommand)]
    Noise(NoiseCmd),
    /// Regenerate every data series and check the published targets.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    #[value(name = "2.1")]
    P21,
    #[value(name = "2.2")]
    P22,
    #[value(name = "2.3")]
    P23,
    #[value(name = "2.4")]
    P24,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::P21 => Protocol::P21,
            ProtocolArg::P22 => Protocol::P22,
            ProtocolArg::P23 => Protocol::P23,
            ProtocolArg::P24 => Protocol::P24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryArg {
    None,
    Impersonate,
    MeasureResend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    Impersonate,
    MeasureResend,
    FakeState,
    Holevo,
}

#[derive(Debug, Subcommand)]
pub enum AuthCmd {
    /// Probability of catching a key-guessing impersonator.
    Detect {
        /// Single round count; omit for the curve over 1..=12.
        #[arg(long)]
        n: Option<u32>,
    },
    /// One authentication session with a seeded random key.
    Simulate {
        #[arg(long, value_enum, default_value = "2.1")]
        protocol: ProtocolArg,
        /// Authentication rounds in the session.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, value_enum, default_value_t = AdversaryArg::None)]
        adversary: AdversaryArg,
        /// Emit the per-round transcript instead of the summary.
        #[arg(long)]
        transcript: bool,
    },
    /// Attack analyses.
    Attack {
        #[arg(long, value_enum, default_value = "2.1")]
        protocol: ProtocolArg,
        #[arg(long, value_enum, default_value_t = AttackArg::MeasureResend)]
        kind: AttackArg,
        /// Rounds per impersonation session.
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    DwLower,
    DwUpper,
    DwUpperPrinted,
}

impl From<BoundArg> for DwBound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::DwLower => DwBound::Lower,
            BoundArg::DwUpper => DwBound::Upper(EveStateForm::Normalized),
            BoundArg::DwUpperPrinted => DwBound::Upper(EveStateForm::Printed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SiftArg {
    #[value(name = "3.1")]
    P31,
    #[value(name = "3.2")]
    P32,
}

impl From<SiftArg> for SiftProtocol {
    fn from(p: SiftArg) -> Self {
        match p {
            SiftArg::P31 => SiftProtocol::P31,
            SiftArg::P32 => SiftProtocol::P32,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum QkdCmd {
    /// Key rate against error rate.
    Rate {
        /// sb1, sb1_y, sb2 or sb2_x; omit for all four.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Error rate where a rate curve or a Devetak-Winter bound reaches zero.
    Threshold {
        #[arg(long, conflicts_with = "bound")]
        curve: Option<String>,
        #[arg(long, value_enum)]
        bound: Option<BoundArg>,
    },
    /// Critical attenuation and distance of the photon-number-splitting attack.
    Pns {
        /// p1 or p2; omit for both.
        #[arg(long)]
        protocol: Option<String>,
        /// Mean photon number; defaults to each protocol's reference value.
        #[arg(long)]
        mu: Option<f64>,
        /// Fibre loss in dB/km.
        #[arg(long, default_value_t = 0.25)]
        loss: f64,
    },
    /// Secret bits per transmitted qubit and classical bit.
    Efficiency,
    /// Monte-Carlo sifting.
    Simulate {
        #[arg(long, value_enum, default_value = "3.2")]
        protocol: SiftArg,
        /// Emit per-row frequencies of the honest table.
        #[arg(long)]
        rows: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Controlled,
    TwoParty,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Controlled => Variant::Controlled,
            VariantArg::TwoParty => Variant::TwoParty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QkaAttackArg {
    Collective,
    Impersonate,
}

#[derive(Debug, Subcommand)]
pub enum QkaCmd {
    /// Agreement rounds with correctness and fairness counts.
    Simulate {
        #[arg(long, value_enum, default_value_t = VariantArg::Controlled)]
        variant: VariantArg,
        /// Fix Alice's bit for every round (fairness probe).
        #[arg(long)]
        alice_bit: Option<u8>,
        /// Decoys per travelling sequence.
        #[arg(long, default_value_t = 0)]
        decoys: usize,
    },
    /// Collective entangling-probe or impersonation analysis.
    Attack {
        #[arg(long, value_enum, default_value_t = QkaAttackArg::Collective)]
        kind: QkaAttackArg,
        /// Key length for the success probability.
        #[arg(long, default_value_t = 6)]
        n: u32,
    },
    /// Tolerable error rate from the Devetak-Winter rate.
    Bound,
}

#[derive(Debug, Subcommand)]
pub enum Dl04Cmd {
    /// Joint distribution of (Alice's bit, Bob's result, Eve's guess).
    Dist {
        #[arg(long)]
        attack: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
    },
    /// Payoffs of a single attack or of a mixed game.
    Payoff {
        /// e.g. e1-e2, or a single attack.
        #[arg(long)]
        game: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Mixed-strategy equilibria of a game.
    Nash {
        #[arg(long)]
        game: String,
    },
    /// Secure error-rate bound over games.
    Bound {
        /// Comma-separated games; defaults to the four reference games.
        #[arg(long)]
        games: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ad,
    Pd,
    Nmdph,
    Nmdpo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CollectiveArg {
    Dephasing,
    Rotation,
}

#[derive(Debug, Subcommand)]
pub enum NoiseCmd {
    /// Average fidelity of the key-agreement final state.
    Fidelity {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Memory strength of the non-Markovian models.
        #[arg(long, default_value_t = 0.5)]
        memory: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Bell-check error probability under collective noise.
    Collective {
        #[arg(long, value_enum)]
        kind: CollectiveArg,
        /// Angle step in degrees.
        #[arg(long, default_value_t = 1.0)]
        step_deg: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReportCmd {
    /// Write every artifact plus a manifest; exits nonzero on any miss.
    All,
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let table = match &cli.command {
        Command::Auth(c) => auth_cmd(c, g)?,
        Command::Qkd(c) => qkd_cmd(c, g)?,
        Command::Qka(c) => qka_cmd(c, g)?,
        Command::Dl04(c) => dl04_cmd(c, g)?,
        Command::Noise(c) => noise_cmd(c)?,
        Command::Report(ReportCmd::All) => return report::report_all(g),
    };
    match &g.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let name = artifact_name(&cli.command);
            crate::output::write_table(dir, &name, &table, g.format)?;
        }
        None => print!("{}", table.render(g.format)),
    }
    Ok(())
}

fn artifact_name(cmd: &Command) -> String {
    let s = match cmd {
        Command::Auth(AuthCmd::Detect { .. }) => "auth_detect",
        Command::Auth(AuthCmd::Simulate { .. }) => "auth_simulate",
        Command::Auth(AuthCmd::Attack { .. }) => "auth_attack",
        Command::Qkd(QkdCmd::Rate { .. }) => "qkd_rate",
        Command::Qkd(QkdCmd::Threshold { .. }) => "qkd_threshold",
        Command::Qkd(QkdCmd::Pns { .. }) => "qkd_pns",
        Command::Qkd(QkdCmd::Efficiency) => "qkd_efficiency",
        Command::Qkd(QkdCmd::Simulate { .. }) => "qkd_simulate",
        Command::Qka(QkaCmd::Simulate { .. }) => "qka_simulate",
        Command::Qka(QkaCmd::Attack { .. }) => "qka_attack",
        Command::Qka(QkaCmd::Bound) => "qka_bound",
        Command::Dl04(Dl04Cmd::Dist { .. }) => "dl04_dist",
        Command::Dl04(Dl04Cmd::Payoff { .. }) => "dl04_payoff",
        Command::Dl04(Dl04Cmd::Nash { .. }) => "dl04_nash",
        Command::Dl04(Dl04Cmd::Bound { .. }) => "dl04_bound",
        Command::Noise(NoiseCmd::Fidelity { .. }) => "noise_fidelity",
        Command::Noise(NoiseCmd::Collective { .. }) => "noise_collective",
        Command::Report(_) => "manifest",
    };
    s.to_string()
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

// ---- auth ----

pub fn auth_detect_curve(max_n: u32) -> Table {
    let mut t = Table::new(&["n", "p_detect"]);
    for n in 1..=max_n {
        t.push(vec![n.into(), auth::detect_probability(n).into()]);
    }
    t
}

pub fn auth_impersonation(protocol: Protocol, n: usize, trials: usize, seed: u64) -> Result<Table, CliError> {
    let s = auth::impersonation_trials(protocol, n, trials, seed)?;
    Ok(Table::record(vec![
        ("protocol", protocol.label().into()),
        ("n", n.into()),
        ("trials", trials.into()),
        ("rejected", s.rejected.into()),
        ("rejection_rate", s.rejection_rate().into()),
        ("p_detect", auth::detect_probability(n as u32).into()),
    ]))
}

pub fn auth_measure_resend() -> Result<Table, CliError> {
    let mut t = Table::new(&["protocol", "h_a", "i_ab", "i_ae", "holevo_cap"]);
    for p in [Protocol::P21, Protocol::P22] {
        let r = auth::measure_resend_analysis(p)?;
        t.push(vec![p.label().into(), r.h_a.into(), r.i_ab.into(), r.i_ae.into(), r.holevo_cap.into()]);
    }
    Ok(t)
}

pub fn auth_holevo() -> Result<Table, CliError> {
    let mut t = Table::new(&["protocol", "holevo"]);
    for p in [Protocol::P23, Protocol::P24] {
        t.push(vec![p.label().into(), auth::intercepted_holevo(p)?.into()]);
    }
    Ok(t)
}

fn auth_cmd(c: &AuthCmd, g: &GlobalOpts) -> Result<Table, CliError> {
    match *c {
        AuthCmd::Detect { n: Some(n) } => Ok(Table::record(vec![("p_detect", auth::detect_probability(n).into())])),
        AuthCmd::Detect { n: None } => Ok(auth_detect_curve(12)),
        AuthCmd::Simulate { protocol, n, adversary, transcript } => {
            let protocol = Protocol::from(protocol);
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let key = KeySequence::random(protocol.key_len(n), &mut rng)?;
            let adversary = match adversary {
                AdversaryArg::None => Adversary::None,
                AdversaryArg::Impersonate => Adversary::Impersonate,
                AdversaryArg::MeasureResend => Adversary::MeasureResend,
            };
            let cfg = SimConfig { seed: g.seed, tolerance: g.tol.unwrap_or(0.0), ..SimConfig::default() };
            let tr = auth::simulate_protocol(protocol, &key, adversary, cfg)?;
            if transcript {
                let mut t = Table::new(&["index", "prepared", "basis", "outcome", "passed"]);
                for r in &tr.rounds {
                    t.push(vec![
                        r.index.into(),
                        r.prepared.clone().into(),
                        r.basis.clone().into(),
                        r.outcome.clone().into(),
                        r.passed.into(),
                    ]);
                }
                return Ok(t);
            }
            let verdict = match tr.verdict {
                auth::Verdict::Accept => "accept",
                auth::Verdict::Reject => "reject",
            };
            Ok(Table::record(vec![
                ("protocol", protocol.label().into()),
                ("adversary", tr.adversary.into()),
                ("rounds", tr.rounds.len().into()),
                ("failed", tr.rounds.iter().filter(|r| !r.passed).count().into()),
                ("decoys_checked", tr.decoys_checked.into()),
                ("decoy_errors", tr.decoy_errors.into()),
                ("error_rate", tr.error_rate.into()),
                ("verdict", verdict.into()),
            ]))
        }
        AuthCmd::Attack { protocol, kind, n } => {
            let protocol = Protocol::from(protocol);
            match kind {
                AttackArg::Impersonate => auth_impersonation(protocol, n, g.rounds, g.seed),
                AttackArg::MeasureResend => {
                    let r = auth::measure_resend_analysis(protocol)?;
                    Ok(Table::record(vec![
                        ("protocol", protocol.label().into()),
                        ("h_a", r.h_a.into()),
                        ("i_ab", r.i_ab.into()),
                        ("i_ae", r.i_ae.into()),
                        ("holevo_cap", r.holevo_cap.into()),
                    ]))
                }
                AttackArg::FakeState if protocol == Protocol::P23 => report::fake_state_reference(),
                AttackArg::FakeState => {
                    Err(CliError::Usage("fake-state reference parameters exist for protocol 2.3 only".into()))
                }
                AttackArg::Holevo => Ok(Table::record(vec![
                    ("protocol", protocol.label().into()),
                    ("holevo", auth::intercepted_holevo(protocol)?.into()),
                ])),
            }
        }
    }
}

// ---- qkd ----

fn parse_curve(s: &str) -> Result<RateCurve, CliError> {
    let norm = s.replace('-', "_");
    let norm = match norm.to_ascii_lowercase().as_str() {
        "sb1y" => "sb1_y".to_string(),
        "sb2x" => "sb2_x".to_string(),
        other => other.to_string(),
    };
    Ok(norm.parse()?)
}

pub fn qkd_rate_table(curves: &[RateCurve], step: f64) -> Result<Table, CliError> {
    let mut cols = vec!["e"];
    cols.extend(curves.iter().map(|c| c.label()));
    let mut t = Table::new(&cols);
    let series: Vec<Vec<(f64, f64)>> =
        curves.iter().map(|&c| keydist::curve_points(c, step)).collect::<Result<_, _>>()?;
    for i in 0..series.first().map_or(0, Vec::len) {
        let mut row = vec![Cell::Num(series[0][i].0)];
        row.extend(series.iter().map(|s| Cell::Num(s[i].1)));
        t.push(row);
    }
    Ok(t)
}

pub fn qkd_pns_table(which: &[PnsProtocol], mu: Option<f64>, loss: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&["protocol", "mean_photon", "loss_db_per_km", "critical_db", "critical_km"]);
    for &p in which {
        let r = keydist::pns_critical(p, mu.unwrap_or(p.default_mean_photon()), loss)?;
        t.push(vec![
            p.label().into(),
            r.mean_photon.into(),
            r.alpha_db_per_km.into(),
            r.critical_db.into(),
            r.critical_km.into(),
        ]);
    }
    Ok(t)
}

/// Published b_s of protocol 3.2, two decimals.
pub const PROTOCOL32_BS_PUBLISHED: f64 = 0.72;

/// `(label, b_s, q_t, b_t)` for both protocols and SARG04, then protocol 3.2
/// again with b_s carried at full precision.
pub fn efficiency_inputs() -> Result<Vec<(&'static str, f64, f64, f64)>, CliError> {
    Ok(vec![
        ("3.1", 0.75, 3.0, 0.625),
        ("3.2", PROTOCOL32_BS_PUBLISHED, 3.0, 0.75),
        ("SARG04", 0.25, 1.0, 1.0),
        ("3.2 (full-precision b_s)", keydist::protocol32_bs()?, 3.0, 0.75),
    ])
}

pub fn qkd_efficiency_table() -> Result<Table, CliError> {
    let mut t = Table::new(&["protocol", "b_s", "q_t", "b_t", "efficiency"]);
    for (label, bs, qt, bt) in efficiency_inputs()? {
        t.push(vec![label.into(), bs.into(), qt.into(), bt.into(), keydist::cabello_efficiency(bs, qt, bt)?.into()]);
    }
    Ok(t)
}

pub fn qkd_simulate_summary(protocol: SiftProtocol, rounds: usize, seed: u64) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = keydist::simulate_rounds(protocol, rounds as u64, &mut rng);
    Table::record(vec![
        ("protocol", protocol.label().into()),
        ("rounds", s.rounds.into()),
        ("sifted_fraction", s.sifted_fraction().into()),
        ("intrinsic_error_rate", s.intrinsic_error_rate().into()),
    ])
}

fn qkd_cmd(c: &QkdCmd, g: &GlobalOpts) -> Result<Table, CliError> {
    match c {
        QkdCmd::Rate { curve, step } => {
            let curves = match curve {
                Some(s) => vec![parse_curve(s)?],
                None => RateCurve::ALL.to_vec(),
            };
            qkd_rate_table(&curves, *step)
        }
        QkdCmd::Threshold { curve: None, bound: Some(b) } => {
            let bound = DwBound::from(*b);
            Ok(Table::record(vec![
                ("bound", format!("{b:?}").to_ascii_lowercase().into()),
                ("root", bound.threshold()?.value().into()),
            ]))
        }
        QkdCmd::Threshold { curve: Some(s), .. } => {
            let c = parse_curve(s)?;
            Ok(Table::record(vec![("curve", c.label().into()), ("root", keydist::threshold(c)?.value().into())]))
        }
        QkdCmd::Threshold { curve: None, bound: None } => {
            let mut t = Table::new(&["curve", "root"]);
            for c in RateCurve::ALL {
                t.push(vec![c.label().into(), keydist::threshold(c)?.value().into()]);
            }
            Ok(t)
        }
        QkdCmd::Pns { protocol, mu, loss } => {
            let which = match protocol {
                Some(s) => vec![s.parse::<PnsProtocol>()?],
                None => vec![PnsProtocol::P1, PnsProtocol::P2],
            };
            qkd_pns_table(&which, *mu, *loss)
        }
        QkdCmd::Efficiency => qkd_efficiency_table(),
        QkdCmd::Simulate { protocol, rows } => {
            let protocol = SiftProtocol::from(*protocol);
            if !rows {
                return Ok(qkd_simulate_summary(protocol, g.rounds, g.seed));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let s = keydist::simulate_rounds(protocol, g.rounds as u64, &mut rng);
            let freq = s.row_frequencies();
            let mut t = Table::new(&["row", "s_a", "s_b1", "s_b2", "expected", "observed"]);
            for (i, r) in keydist::HONEST_TABLE.iter().enumerate() {
                t.push(vec![
                    (i + 1).into(),
                    r.s_a.label().into(),
                    r.s_b1.label().into(),
                    r.s_b2.label().into(),
                    (1.0 / f64::from(r.den)).into(),
                    freq.get(&i).copied().unwrap_or(0.0).into(),
                ]);
            }
            Ok(t)
        }
    }
}

// ---- qka ----

pub fn qka_bound_record(alpha: f64) -> Result<Table, CliError> {
    Ok(Table::record(vec![
        ("alpha_rad", alpha.into()),
        ("reproduction", keyagree::dw_tolerable_qber(alpha, DwMode::Reproduction)?.into()),
        ("oracle", keyagree::dw_tolerable_qber(alpha, DwMode::Oracle)?.into()),
    ]))
}

pub fn qka_bound_curve() -> Result<Table, CliError> {
    let mut t = Table::new(&["alpha_deg", "reproduction", "oracle"]);
    for deg in (5..=90).step_by(5) {
        let a = f64::from(deg).to_radians();
        let root = |m| keyagree::dw_tolerable_qber(a, m).ok();
        t.push(vec![f64::from(deg).into(), root(DwMode::Reproduction).into(), root(DwMode::Oracle).into()]);
    }
    Ok(t)
}

fn qka_cmd(c: &QkaCmd, g: &GlobalOpts) -> Result<Table, CliError> {
    match *c {
        QkaCmd::Simulate { variant, alice_bit, decoys } => {
            if alice_bit.is_some_and(|b| b > 1) {
                return Err(usage("--alice-bit must be 0 or 1"));
            }
            let choices = Choices { alice: alice_bit, ..Choices::default() };
            let run = keyagree::simulate_cqka(g.rounds, variant.into(), choices, decoys, g.seed)?;
            let agree = run.alice_key.iter().zip(&run.bob_key).filter(|(a, b)| a == b).count();
            let ones = run.alice_key.iter().filter(|&&k| k == 1).count();
            Ok(Table::record(vec![
                ("rounds", run.rounds.len().into()),
                ("agreeing", agree.into()),
                ("key_ones_fraction", (ones as f64 / run.rounds.len() as f64).into()),
                ("decoys", run.decoys.into()),
                ("decoy_errors", run.decoy_errors.into()),
            ]))
        }
        QkaCmd::Attack { kind: QkaAttackArg::Collective, n } => {
            let alpha = g.alpha().unwrap_or(FRAC_PI_2);
            let s = keyagree::collective_attack_stats(&AncillaParams::balanced(alpha), n)?;
            Ok(Table::record(vec![
                ("alpha_rad", alpha.into()),
                ("p_d", s.p_d.into()),
                ("d_printed", s.d_printed.into()),
                ("d_oracle", s.d_oracle.into()),
                ("eve_information", s.eve_information.into()),
                ("eve_key_error", s.eve_key_error.into()),
                ("n", n.into()),
                ("success", s.success.into()),
            ]))
        }
        QkaCmd::Attack { kind: QkaAttackArg::Impersonate, .. } => report::qka_impersonation(100, g.seed),
        QkaCmd::Bound => match g.alpha() {
            Some(a) => qka_bound_record(a),
            None => qka_bound_curve(),
        },
    }
}

// ---- dl04 ----

pub fn dl04_nash_table(game: &Game, params: SearchParams) -> Result<Table, CliError> {
    let pts = dl04game::find_equilibria(game, params, &PayoffWeights::default())?;
    Ok(nash_table(&pts))
}

pub fn nash_table(points: &[EquilibriumPoint]) -> Table {
    let mut t = Table::new(&["p", "q", "r", "p_a", "p_b", "p_e", "payoff_difference", "qber", "max_residual"]);
    for e in points {
        t.push(vec![
            e.profile.p.into(),
            e.profile.q.into(),
            e.profile.r.into(),
            e.payoffs.alice.into(),
            e.payoffs.bob.into(),
            e.payoffs.eve.into(),
            (e.payoffs.eve - e.payoffs.alice).into(),
            e.expected_qber.into(),
            e.max_residual().into(),
        ]);
    }
    t
}

pub fn dl04_bound_table(games: &[Game], params: SearchParams) -> Result<Table, CliError> {
    let w = PayoffWeights::default();
    let analyses: Vec<GameAnalysis> =
        games.iter().map(|&g| GameAnalysis::run(g, params, &w)).collect::<Result<_, _>>()?;
    bound_table(&analyses)
}

pub fn bound_table(analyses: &[GameAnalysis]) -> Result<Table, CliError> {
    let b = dl04game::secure_bound(analyses)?;
    let mut t = Table::new(&["game", "equilibria", "min_qber", "p_d_min", "p_d_max"]);
    for (a, (game, min)) in analyses.iter().zip(&b.per_game) {
        let (lo, hi) = game.detection_range();
        t.push(vec![game.label().into(), a.equilibria.len().into(), (*min).into(), lo.into(), hi.into()]);
    }
    t.push(vec![
        "global".into(),
        analyses.iter().map(|a| a.equilibria.len()).sum::<usize>().into(),
        b.global.into(),
        b.detection_range.0.into(),
        b.detection_range.1.into(),
    ]);
    Ok(t)
}

fn dl04_cmd(c: &Dl04Cmd, g: &GlobalOpts) -> Result<Table, CliError> {
    match c {
        Dl04Cmd::Dist { attack, p, q } => {
            let a: AttackKind = attack.parse()?;
            let d = dl04game::joint_distribution(a, *p, *q)?;
            let oracle = dl04game::oracle_distribution(a, *p, *q).ok();
            let mut t = Table::new(&["j", "m", "k", "closed_form", "oracle"]);
            for (i, &v) in d.probs().iter().enumerate() {
                t.push(vec![(i >> 2).into(), ((i >> 1) & 1).into(), (i & 1).into(), v.into(), oracle.map(|o| o[i]).into()]);
            }
            Ok(t)
        }
        Dl04Cmd::Payoff { game, p, q, r } => {
            let game: Game = game.parse()?;
            let s = StrategyProfile::new(*p, *q, *r)?;
            let w = PayoffWeights::default();
            let pay = game.payoff(s, &w)?;
            let res = dl04game::residuals(&game, s, &w)?;
            Ok(Table::record(vec![
                ("game", game.label().into()),
                ("p", s.p.into()),
                ("q", s.q.into()),
                ("r", s.r.into()),
                ("p_a", pay.alice.into()),
                ("p_b", pay.bob.into()),
                ("p_e", pay.eve.into()),
                ("qber", game.expected_qber(s).into()),
                ("residual_alice", res[0].into()),
                ("residual_bob", res[1].into()),
                ("residual_eve", res[2].into()),
            ]))
        }
        Dl04Cmd::Nash { game } => dl04_nash_table(&game.parse()?, g.search_params()),
        Dl04Cmd::Bound { games } => {
            let games: Vec<Game> = match games {
                Some(s) => s.split(',').map(str::parse).collect::<Result<_, _>>()?,
                None => Game::REFERENCE.to_vec(),
            };
            dl04_bound_table(&games, g.search_params())
        }
    }
}

// ---- noise ----

pub fn noise_family(model: ModelArg, memory: f64) -> NoiseFamily {
    match model {
        ModelArg::Ad => NoiseFamily::AmplitudeDamping,
        ModelArg::Pd => NoiseFamily::PhaseDamping,
        ModelArg::Nmdph => NoiseFamily::NonMarkovianDephasing { alpha: memory },
        ModelArg::Nmdpo => NoiseFamily::NonMarkovianDepolarizing { alpha: memory },
    }
}

pub fn noise_fidelity_table(family: NoiseFamily, step: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&["x", "oracle", "printed", "discrepancy"]);
    for pt in channels::fidelity_curve(family, step)? {
        let r = pt.report;
        t.push(vec![
            pt.x.into(),
            r.map(|r| r.oracle).into(),
            r.map(|r| r.printed).into(),
            r.map(|r| r.discrepancy()).into(),
        ]);
    }
    Ok(t)
}

pub fn noise_collective_table(kind: CollectiveArg, step_deg: f64) -> Result<Table, CliError> {
    if !(step_deg > 0.0 && step_deg <= 180.0) {
        return Err(usage(format!("--step-deg {step_deg}")));
    }
    let mut t = Table::new(&["angle_deg", "p_error"]);
    let n = (180.0 / step_deg + 1e-9).floor() as usize;
    for i in 0..=n {
        let deg = i as f64 * step_deg;
        let noise = match kind {
            CollectiveArg::Dephasing => CollectiveNoise::Dephasing(deg.to_radians()),
            CollectiveArg::Rotation => CollectiveNoise::Rotation(deg.to_radians()),
        };
        t.push(vec![deg.into(), channels::collective_error_probability(noise).into()]);
    }
    Ok(t)
}

fn noise_cmd(c: &NoiseCmd) -> Result<Table, CliError> {
    match *c {
        NoiseCmd::Fidelity { model, memory, step } => noise_fidelity_table(noise_family(model, memory), step),
        NoiseCmd::Collective { kind, step_deg } => noise_collective_table(kind, step_deg),
    }
}
