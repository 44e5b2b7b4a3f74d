//! Task planning (name and reference resolution) and execution.

use std::collections::BTreeMap;
use std::time::Instant;

use dlie_core::chern::{chern_cochain, chern_relation_check, curvature_antisymmetry_check, curvature_cochain};
use dlie_core::connection::Connection;
use dlie_core::dlie::{DLieAlgebra, DLieMorphism};
use dlie_core::jet::{atiyah_check, roundtrip_check, splitting_from_connection};
use dlie_core::lie_rinehart::{BracketStructure, LieRinehartPresentation, SampleConfig, ScalarCochain};
use dlie_core::nonabelian::EndExtension;
use dlie_core::poly::Derivation;
use dlie_core::projective::ProjectiveBasis;
use dlie_core::tensor::{
    almost_comm_check, evaluation_check, ideal_annihilation_witness, ideal_generators, normal_form, normal_form_check,
    parse_tensor, QuotientKind, RewriteConfig, TensorElement, TensorSample,
};
use dlie_core::{CheckReport, Outcome};
use rayon::prelude::*;

use crate::error::CliError;
use crate::problem::{ProblemFile, SourceMap, TaskSpec};
use crate::report::{Expect, Report, Status, TaskReport};
use crate::workspace::{Workspace, DER};

/// Flags shared by every task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub max_steps: usize,
    pub truncate_degree: Option<usize>,
    pub parallel: bool,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, max_steps: 1_000_000, truncate_degree: None, parallel: false, timings: false }
    }
}

/// Every task name understood by `run`.
pub const TASK_NAMES: &[&str] = &[
    "check-cocycle",
    "check-lr",
    "check-axioms",
    "check-morphism",
    "connection-laws",
    "curvature",
    "curvature-transfer",
    "curvature-type",
    "psi-roundtrip",
    "diff-orders",
    "nf",
    "nf-suite",
    "almost-comm",
    "evaluation",
    "annihilator",
    "idempotent-curvature",
    "end-ext",
    "jet",
    "chern",
];

#[derive(Clone, Debug)]
enum Op {
    CheckCocycle(ScalarCochain, LieRinehartPresentation),
    CheckLr(LieRinehartPresentation),
    CheckAxioms(DLieAlgebra),
    CheckMorphism(DLieMorphism, DLieAlgebra, DLieAlgebra),
    ConnectionLaws(Connection),
    Curvature(Connection),
    CurvatureTransfer(Connection),
    CurvatureType(Connection, ScalarCochain),
    PsiRoundtrip(Connection),
    DiffOrders(Connection, usize),
    Nf { t: DLieAlgebra, kind: QuotientKind, expr: TensorElement, expect: Option<TensorElement> },
    NfSuite(DLieAlgebra, Vec<QuotientKind>, usize),
    AlmostComm(DLieAlgebra, Vec<QuotientKind>, usize),
    Evaluation(Connection, Vec<QuotientKind>, usize),
    Annihilator(Connection, ScalarCochain),
    IdempotentCurvature(ProjectiveBasis),
    EndExt { rho: Connection, checks: Vec<String>, degree: usize, corrupt: bool },
    Jet(Connection, Vec<String>),
    Chern(Connection, Option<ScalarCochain>, usize),
}

/// A resolved task, ready to run.
#[derive(Clone, Debug)]
pub struct Planned {
    spec: TaskSpec,
    op: Op,
    cfg: SampleConfig,
    expect: Expect,
}

struct Planner<'a> {
    ws: &'a Workspace,
    source: &'a SourceMap,
    spec: &'a TaskSpec,
}

const COMMON: &[&str] = &["seed", "samples", "max-degree", "expect"];

impl<'a> Planner<'a> {
    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Input(self.source.locate(self.spec.offset, format!("task '{}': {}", self.spec.name, msg.into())))
    }

    fn unresolved(&self, kind: &str, id: &str) -> CliError {
        CliError::Unresolved {
            kind: kind.into(),
            id: id.into(),
            at: self.source.locate(self.spec.offset, format!("task '{}': unknown {kind} '{id}'", self.spec.name)),
        }
    }

    fn target(&self) -> Result<&'a str, CliError> {
        self.spec.target.as_deref().ok_or_else(|| self.err("missing target"))
    }

    fn opt(&self, key: &str) -> Option<&'a str> {
        self.spec.options.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.opt(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.err(format!("option {key}='{v}' is not a number"))),
        }
    }

    fn connection(&self, id: &str) -> Result<Connection, CliError> {
        self.ws.connections.get(id).cloned().ok_or_else(|| self.unresolved("connection", id))
    }

    fn dlie(&self, id: &str) -> Result<DLieAlgebra, CliError> {
        self.ws.dlie.get(id).cloned().ok_or_else(|| self.unresolved("dlie", id))
    }

    fn cochain(&self, id: &str) -> Result<ScalarCochain, CliError> {
        self.ws.cochains.get(id).map(|c| c.cochain.clone()).ok_or_else(|| self.unresolved("cochain", id))
    }

    fn generator_cochain(&self, rho: &Connection, id: &str) -> Result<ScalarCochain, CliError> {
        let f = self.cochain(id)?;
        if f.rank() != rho.algebra().n() || f.degree() != 2 {
            return Err(self.err(format!("cochain '{id}' must be a 2-cochain on the {} non-central generators", rho.algebra().n())));
        }
        Ok(f)
    }

    fn kinds(&self, default: &[QuotientKind]) -> Result<Vec<QuotientKind>, CliError> {
        match self.opt("kind") {
            None | Some("all") => Ok(default.to_vec()),
            Some(list) => list
                .split(',')
                .map(|k| QuotientKind::parse(k).ok_or_else(|| self.err(format!("unknown kind '{k}'"))))
                .collect(),
        }
    }

    fn checks(&self, all: &[&str]) -> Result<Vec<String>, CliError> {
        match self.opt("check") {
            None | Some("all") => Ok(all.iter().map(|s| s.to_string()).collect()),
            Some(list) => list
                .split(',')
                .map(|c| if all.contains(&c) { Ok(c.to_string()) } else { Err(self.err(format!("unknown check '{c}'"))) })
                .collect(),
        }
    }

    fn tensor(&self, t: &DLieAlgebra, key: &str) -> Result<Option<TensorElement>, CliError> {
        self.opt(key)
            .map(|src| parse_tensor(src, t.rank(), t.nvars()).map_err(|e| self.err(format!("{key}: {e}"))))
            .transpose()
    }

    fn plan(&self, opts: &RunOptions) -> Result<Planned, CliError> {
        let (op, extra): (Op, &[&str]) = match self.spec.name.as_str() {
            "check-cocycle" => {
                let id = self.target()?;
                let nc = self.ws.cochains.get(id).ok_or_else(|| self.unresolved("cochain", id))?;
                let on = if nc.on == DER {
                    LieRinehartPresentation::derivations(self.ws.nvars)
                } else {
                    self.ws.lie_rinehart.get(&nc.on).cloned().ok_or_else(|| self.unresolved("lie_rinehart", &nc.on))?
                };
                (Op::CheckCocycle(nc.cochain.clone(), on), &[])
            }
            "check-lr" => {
                let id = self.target()?;
                let lr = self.ws.lie_rinehart.get(id).cloned().ok_or_else(|| self.unresolved("lie_rinehart", id))?;
                (Op::CheckLr(lr), &[])
            }
            "check-axioms" => (Op::CheckAxioms(self.dlie(self.target()?)?), &[]),
            "check-morphism" => {
                let id = self.target()?;
                let m = self.ws.morphisms.get(id).ok_or_else(|| self.unresolved("morphism", id))?;
                (Op::CheckMorphism(m.morphism.clone(), self.dlie(&m.source)?, self.dlie(&m.target)?), &[])
            }
            "connection-laws" => (Op::ConnectionLaws(self.connection(self.target()?)?), &[]),
            "curvature" => (Op::Curvature(self.connection(self.target()?)?), &[]),
            "curvature-transfer" => (Op::CurvatureTransfer(self.connection(self.target()?)?), &[]),
            "curvature-type" | "annihilator" => {
                let rho = self.connection(self.target()?)?;
                let id = self.opt("cocycle").ok_or_else(|| self.err("needs cocycle=<id>"))?;
                let f = self.generator_cochain(&rho, id)?;
                let op = if self.spec.name == "annihilator" { Op::Annihilator(rho, f) } else { Op::CurvatureType(rho, f) };
                (op, &["cocycle"])
            }
            "psi-roundtrip" => (Op::PsiRoundtrip(self.connection(self.target()?)?), &[]),
            "diff-orders" => (Op::DiffOrders(self.connection(self.target()?)?, self.num("length", 3)?), &["length"]),
            "nf" => {
                let t = self.dlie(self.target()?)?;
                let kind = match self.opt("kind") {
                    None => QuotientKind::UTensor,
                    Some(k) => QuotientKind::parse(k).ok_or_else(|| self.err(format!("unknown kind '{k}'")))?,
                };
                let expr = self.tensor(&t, "expr")?.ok_or_else(|| self.err("needs expr=\"...\""))?;
                let expect = self.tensor(&t, "expect-nf")?;
                (Op::Nf { t, kind, expr, expect }, &["kind", "expr", "expect-nf"])
            }
            "nf-suite" => {
                let t = self.dlie(self.target()?)?;
                (Op::NfSuite(t, self.kinds(&QuotientKind::ALL)?, self.num("length", 4)?), &["kind", "length"])
            }
            "almost-comm" => {
                let t = self.dlie(self.target()?)?;
                let kinds = self.kinds(&[QuotientKind::UTensorTilde, QuotientKind::URhoTilde])?;
                (Op::AlmostComm(t, kinds, self.num("length", 3)?), &["kind", "length"])
            }
            "evaluation" => {
                let rho = self.connection(self.target()?)?;
                let kinds = self.kinds(&[QuotientKind::UTensor, QuotientKind::URho])?;
                (Op::Evaluation(rho, kinds, self.num("length", 4)?), &["kind", "length"])
            }
            "idempotent-curvature" => {
                let id = self.target()?;
                let pb = self.ws.bases.get(id).cloned().ok_or_else(|| self.unresolved("projective_basis", id))?;
                (Op::IdempotentCurvature(pb), &[])
            }
            "end-ext" => {
                let rho = self.connection(self.target()?)?;
                let checks = self.checks(&["axioms", "hom", "orders"])?;
                let corrupt = self.opt("corrupt").is_some_and(|v| v == "true");
                (Op::EndExt { rho, checks, degree: self.num("degree", 3)?, corrupt }, &["check", "degree", "corrupt"])
            }
            "jet" => {
                let rho = self.connection(self.target()?)?;
                (Op::Jet(rho, self.checks(&["sequence", "split", "roundtrip"])?), &["check"])
            }
            "chern" => {
                let rho = self.connection(self.target()?)?;
                let f = self.opt("cocycle").map(|id| self.generator_cochain(&rho, id)).transpose()?;
                (Op::Chern(rho, f, self.num("k", 2)?), &["cocycle", "k"])
            }
            other => return Err(self.err(format!("unknown task '{other}'; known tasks: {}", TASK_NAMES.join(", ")))),
        };
        for key in self.spec.options.keys() {
            if !COMMON.contains(&key.as_str()) && !extra.contains(&key.as_str()) {
                return Err(self.err(format!("unknown option '{key}'")));
            }
        }
        let expect = match self.opt("expect") {
            None | Some("pass") => Expect::Pass,
            Some("fail") => Expect::Fail,
            Some(v) => return Err(self.err(format!("expect must be pass or fail, not '{v}'"))),
        };
        let cfg = SampleConfig { seed: self.num("seed", opts.seed)?, samples: self.num("samples", 50)?, max_degree: self.num("max-degree", 2)? };
        Ok(Planned { spec: self.spec.clone(), op, cfg, expect })
    }
}

/// Resolves every task before anything runs, so reference errors surface
/// as input errors.
pub fn plan(file: &ProblemFile, ws: &Workspace, opts: &RunOptions) -> Result<Vec<Planned>, CliError> {
    file.tasks.iter().map(|spec| Planner { ws, source: &file.source, spec }.plan(opts)).collect()
}

/// Plans a single task against a workspace, for the subcommands.
pub fn plan_one(ws: &Workspace, spec: &TaskSpec, opts: &RunOptions) -> Result<Planned, CliError> {
    let source = SourceMap::new("");
    Planner { ws, source: &source, spec }.plan(opts)
}

fn from_result(name: &str, r: dlie_core::error::Result<CheckReport>) -> Result<CheckReport, String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn single(name: &str, seed: Option<u64>, check: &str, witness: Option<String>) -> CheckReport {
    let mut rep = CheckReport::new(name, seed);
    rep.record(check, witness);
    rep
}

struct Outcome2 {
    checks: Vec<CheckReport>,
    output: BTreeMap<String, String>,
}

fn execute(p: &Planned, opts: &RunOptions) -> Result<Outcome2, String> {
    let cfg = p.cfg;
    let rw = RewriteConfig { max_steps: opts.max_steps, truncate_degree: opts.truncate_degree, ..Default::default() };
    let sample = |len: usize, default_samples: usize| TensorSample {
        seed: cfg.seed,
        samples: p.spec.options.get("samples").map_or(default_samples, |_| cfg.samples),
        max_len: len,
        ..Default::default()
    };
    let mut output = BTreeMap::new();
    let checks = match &p.op {
        Op::CheckCocycle(f, on) => vec![single("cocycle", None, "closed", f.cocycle_witness(on))],
        Op::CheckLr(lr) => vec![lr.check_axioms(cfg)],
        Op::CheckAxioms(t) => vec![t.check_axioms(cfg)],
        Op::CheckMorphism(m, s, t) => vec![m.check(s, t, cfg)],
        Op::ConnectionLaws(rho) => vec![rho.check_laws(cfg)],
        Op::Curvature(rho) => {
            let t = rho.algebra();
            for i in 1..t.rank() {
                for j in i + 1..t.rank() {
                    let r = rho.curvature(&t.basis(i), &t.basis(j));
                    output.insert(format!("R(u{i}, u{j})"), r.to_string());
                }
            }
            vec![rho.order_check(SampleConfig { samples: cfg.samples.min(10), ..cfg }, 1)]
        }
        Op::CurvatureTransfer(rho) => vec![from_result("curvature_transfer", rho.curvature_transfer_check(cfg))?],
        Op::CurvatureType(rho, f) => {
            let w = rho.curvature_type_witness(f).map_err(|e| e.to_string())?;
            vec![single("curvature_type", None, "scalar_curvature", w)]
        }
        Op::PsiRoundtrip(rho) => {
            let back = rho.to_psi_connection().and_then(|c| c.to_connection(rho.algebra())).map_err(|e| e.to_string())?;
            vec![single("psi_correspondence", None, "roundtrip", (&back != rho).then(|| "round trip changed the connection".to_string()))]
        }
        Op::DiffOrders(rho, len) => vec![rho.order_check(cfg, *len)],
        Op::Nf { t, kind, expr, expect } => {
            let nf = normal_form(expr, t, *kind, rw).map_err(|e| e.to_string())?;
            output.insert("normal_form".into(), nf.element.to_string());
            output.insert("degree".into(), nf.element.degree().map_or("-inf".into(), |d| d.to_string()));
            output.insert("steps".into(), nf.steps.to_string());
            let mut rep = CheckReport::new("normal_form", None);
            match expect {
                None => rep.pass("computed"),
                Some(e) => {
                    let want = normal_form(e, t, *kind, rw).map_err(|e| e.to_string())?.element;
                    rep.record("matches_expected", (want != nf.element).then(|| format!("expected {want}")));
                }
            }
            vec![rep]
        }
        Op::NfSuite(t, kinds, len) => kinds.iter().map(|k| normal_form_check(t, *k, sample(*len, 100), rw)).collect(),
        Op::AlmostComm(t, kinds, len) => kinds.iter().map(|k| almost_comm_check(t, *k, sample(*len, 100), rw)).collect(),
        Op::Evaluation(rho, kinds, len) => kinds.iter().map(|k| evaluation_check(rho, *k, sample(*len, 50), rw)).collect(),
        Op::Annihilator(rho, f) => {
            let killed = ideal_annihilation_witness(rho, &ideal_generators(rho.algebra(), f));
            let typed = rho.curvature_type_witness(f).map_err(|e| e.to_string())?;
            output.insert("annihilated".into(), killed.is_none().to_string());
            output.insert("curvature_type".into(), typed.is_none().to_string());
            let w = (killed.is_none() != typed.is_none()).then(|| format!("ideal: {killed:?}, curvature type: {typed:?}"));
            vec![single("annihilator", None, "iff_curvature_type", w)]
        }
        Op::IdempotentCurvature(pb) => {
            let m = pb.nvars();
            let ders: Vec<Derivation> = (0..m).map(|i| Derivation::partial(m, i)).collect();
            let mut out = Vec::new();
            let mut anti = CheckReport::new("rkl_antisymmetrization", None);
            for (i, a) in ders.iter().enumerate() {
                for (j, b) in ders.iter().enumerate() {
                    if i < j {
                        let mut rep = pb.idempotent_curvature_check(a, b);
                        rep.name = format!("idempotent_curvature(d{}, d{})", i + 1, j + 1);
                        out.push(rep);
                    }
                    anti.record(format!("d{}_d{}", i + 1, j + 1), pb.rkl_antisymmetrization_witness(a, b));
                }
            }
            out.push(anti);
            out
        }
        Op::EndExt { rho, checks, degree, corrupt } => {
            let end = if *corrupt { EndExtension::corrupted(rho) } else { EndExtension::new(rho) }.map_err(|e| e.to_string())?;
            let small = rho.algebra().n() <= 2;
            checks
                .iter()
                .map(|c| match c.as_str() {
                    "axioms" => end.check_axioms(cfg),
                    "hom" => end.check_hom(cfg, small),
                    _ => end.image_order_check(*degree, p.spec.options.get("samples").map_or(30, |_| cfg.samples), cfg.seed),
                })
                .collect()
        }
        Op::Jet(rho, checks) => checks
            .iter()
            .map(|c| match c.as_str() {
                "sequence" => atiyah_check(rho.algebra(), rho.rank(), cfg),
                "split" => {
                    let (_, mut rep) = splitting_from_connection(rho, cfg);
                    output.insert("psi".into(), rho.psi().to_string());
                    if !rho.psi_is_identity() {
                        rep.name = "splitting (psi != Id)".into();
                    }
                    rep
                }
                _ => roundtrip_check(rho, cfg),
            })
            .collect(),
        Op::Chern(rho, f, k) => {
            let r = curvature_cochain(rho).map_err(|e| e.to_string())?;
            output.insert("curvature".into(), r.to_string());
            output.insert("c1".into(), chern_cochain(rho, 1).map_err(|e| e.to_string())?.to_string());
            output.insert(format!("c{k}"), chern_cochain(rho, *k).map_err(|e| e.to_string())?.to_string());
            let w = chern_relation_check(rho, f.as_ref(), *k).map_err(|e| e.to_string())?;
            vec![from_result("antisymmetry", curvature_antisymmetry_check(rho, SampleConfig { samples: 10, ..cfg }))?, single("chern_relation", None, &format!("k{k}"), w)]
        }
    };
    Ok(Outcome2 { checks, output })
}

fn run_planned(index: usize, p: &Planned, opts: &RunOptions) -> TaskReport {
    let start = Instant::now();
    let result = execute(p, opts);
    let millis = opts.timings.then(|| start.elapsed().as_millis());
    let (checks, output, error) = match result {
        Ok(o) => (o.checks, o.output, None),
        Err(e) => (Vec::new(), BTreeMap::new(), Some(e)),
    };
    let observed = if error.is_some() {
        Status::Error
    } else if checks.iter().all(|c| c.checks.iter().all(|r| !matches!(r.outcome, Outcome::Fail(_)))) {
        Status::Pass
    } else {
        Status::Fail
    };
    let status = match (p.expect, observed) {
        (_, Status::Error) => Status::Error,
        (Expect::Pass, s) => s,
        (Expect::Fail, Status::Fail) => Status::Pass,
        (Expect::Fail, _) => Status::Fail,
    };
    TaskReport {
        index,
        task: p.spec.name.clone(),
        target: p.spec.target.clone(),
        options: p.spec.options.clone(),
        status,
        expect: p.expect,
        observed,
        seed: p.cfg.seed,
        checks,
        output,
        error,
        millis,
    }
}

/// Runs planned tasks in order (or concurrently with `parallel`); the report
/// lists them in file order either way.
pub fn run(file_name: &str, planned: &[Planned], opts: &RunOptions) -> Report {
    let tasks: Vec<TaskReport> = if opts.parallel {
        planned.par_iter().enumerate().map(|(i, p)| run_planned(i + 1, p, opts)).collect()
    } else {
        planned.iter().enumerate().map(|(i, p)| run_planned(i + 1, p, opts)).collect()
    };
    Report::new(file_name, opts.seed, tasks)
}
