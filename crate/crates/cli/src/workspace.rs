//! Resolution of problem-file blocks into kernel objects.

use std::collections::BTreeMap;

use dlie_core::connection::Connection;
use dlie_core::dlie::{DLieAlgebra, DLieMorphism};
use dlie_core::lie_rinehart::{BracketStructure, Combination, LieRinehartPresentation, ScalarCochain};
use dlie_core::poly::{Derivation, Poly, PolyMatrix};
use dlie_core::library;
use dlie_core::projective::ProjectiveBasis;

use crate::error::CliError;
use crate::problem::{Block, ProblemFile, Value};

/// A cochain together with the algebra it lives on (`Der` or a named
/// Lie-Rinehart block).
#[derive(Clone, Debug)]
pub struct NamedCochain {
    pub cochain: ScalarCochain,
    pub on: String,
}

#[derive(Clone, Debug)]
pub struct NamedMorphism {
    pub morphism: DLieMorphism,
    pub source: String,
    pub target: String,
}

/// Every object defined by a problem file, by name.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub nvars: usize,
    pub lie_rinehart: BTreeMap<String, LieRinehartPresentation>,
    pub cochains: BTreeMap<String, NamedCochain>,
    pub dlie: BTreeMap<String, DLieAlgebra>,
    pub connections: BTreeMap<String, Connection>,
    pub bases: BTreeMap<String, ProjectiveBasis>,
    pub morphisms: BTreeMap<String, NamedMorphism>,
}

pub const DER: &str = "Der";

struct Ctx<'a> {
    file: &'a ProblemFile,
    ws: Workspace,
}

impl<'a> Ctx<'a> {
    fn at(&self, offset: usize, msg: impl Into<String>) -> CliError {
        CliError::Input(self.file.source.locate(offset, msg))
    }

    fn unresolved(&self, offset: usize, kind: &str, id: &str) -> CliError {
        CliError::Unresolved { kind: kind.into(), id: id.into(), at: self.file.source.locate(offset, format!("unknown {kind} '{id}'")) }
    }

    fn core(&self, offset: usize, e: dlie_core::Error) -> CliError {
        self.at(offset, e.to_string())
    }

    fn atom<'v>(&self, v: &'v Value) -> Result<&'v str, CliError> {
        match v {
            Value::Atom { text, .. } => Ok(text),
            _ => Err(self.at(v.offset(), "expected a single value")),
        }
    }

    fn list<'v>(&self, v: &'v Value) -> Result<&'v [Value], CliError> {
        match v {
            Value::List { items, .. } => Ok(items),
            _ => Err(self.at(v.offset(), "expected a list")),
        }
    }

    fn poly(&self, v: &Value) -> Result<Poly, CliError> {
        let text = self.atom(v)?;
        Poly::parse(text, self.ws.nvars).map_err(|e| self.at(v.offset() + e.pos, e.msg))
    }

    fn polys(&self, v: &Value) -> Result<Vec<Poly>, CliError> {
        self.list(v)?.iter().map(|x| self.poly(x)).collect()
    }

    fn matrix(&self, v: &Value) -> Result<PolyMatrix, CliError> {
        let rows: Vec<Vec<Poly>> = self.list(v)?.iter().map(|r| self.polys(r)).collect::<Result<_, _>>()?;
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
            return Err(self.at(v.offset(), "matrix rows must be nonempty and of equal length"));
        }
        Ok(PolyMatrix::from_rows(rows))
    }

    fn usize_field(&self, b: &Block, key: &str) -> Result<Option<usize>, CliError> {
        match b.field(key) {
            None => Ok(None),
            Some(f) => self.atom(&f.value)?.parse().map(Some).map_err(|_| self.at(f.value.offset(), format!("'{key}' must be a number"))),
        }
    }

    fn required<'b>(&self, b: &'b Block, key: &str) -> Result<&'b Value, CliError> {
        b.field(key).map(|f| &f.value).ok_or_else(|| self.at(b.offset, format!("{} '{}' needs '{key}'", b.kind, b.name)))
    }

    /// `(1,2)` or `(1,2,3)`, 1-based, as 0-based indices.
    fn index_tuple(&self, v: &Value, rank: usize) -> Result<Vec<usize>, CliError> {
        let text = self.atom(v)?;
        let inner = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(text);
        inner
            .split(',')
            .map(|s| match s.trim().parse::<usize>() {
                Ok(i) if i >= 1 && i <= rank => Ok(i - 1),
                _ => Err(self.at(v.offset(), format!("index '{}' out of range 1..={rank}", s.trim()))),
            })
            .collect()
    }

    fn lr_rank(&self, on: &str, offset: usize) -> Result<usize, CliError> {
        if on == DER {
            Ok(self.ws.nvars)
        } else {
            self.ws.lie_rinehart.get(on).map(|l| l.rank()).ok_or_else(|| self.unresolved(offset, "lie_rinehart", on))
        }
    }

    fn lie_rinehart(&mut self, b: &Block) -> Result<(), CliError> {
        let m = self.ws.nvars;
        let lr = if b.field("derivations").is_some() {
            LieRinehartPresentation::derivations(m)
        } else {
            let anchors: Vec<Derivation> = self
                .list(self.required(b, "anchor")?)?
                .iter()
                .map(|v| {
                    let c = self.polys(v)?;
                    if c.len() != m {
                        return Err(self.at(v.offset(), format!("anchor needs {m} coefficients")));
                    }
                    Ok(Derivation::new(c))
                })
                .collect::<Result<_, _>>()?;
            let n = anchors.len();
            if let Some(r) = self.usize_field(b, "rank")? {
                if r != n {
                    return Err(self.at(b.offset, format!("rank {r} but {n} anchors")));
                }
            }
            let mut brackets = BTreeMap::new();
            if let Some(f) = b.field("brackets") {
                let Value::Map { entries, .. } = &f.value else {
                    return Err(self.at(f.value.offset(), "brackets must be a map"));
                };
                for (k, v) in entries {
                    let ij = self.index_tuple(k, n)?;
                    if ij.len() != 2 || ij[0] == ij[1] {
                        return Err(self.at(k.offset(), "bracket keys are pairs of distinct generators"));
                    }
                    let c = self.polys(v)?;
                    if c.len() != n {
                        return Err(self.at(v.offset(), format!("bracket value needs {n} coefficients")));
                    }
                    let (key, c) = if ij[0] < ij[1] { ((ij[0], ij[1]), Combination(c)) } else { ((ij[1], ij[0]), -&Combination(c)) };
                    brackets.insert(key, c);
                }
            }
            LieRinehartPresentation::new(m, anchors, brackets)
        };
        self.ws.lie_rinehart.insert(b.name.clone(), lr);
        Ok(())
    }

    fn cochain(&mut self, b: &Block) -> Result<(), CliError> {
        let on = match b.field("on") {
            Some(f) => self.atom(&f.value)?.to_string(),
            None => DER.to_string(),
        };
        let rank = self.lr_rank(&on, b.offset)?;
        let degree = self.usize_field(b, "degree")?.unwrap_or(2);
        let mut c = ScalarCochain::zero(self.ws.nvars, rank, degree);
        if let Some(f) = b.field("values") {
            let Value::Map { entries, .. } = &f.value else {
                return Err(self.at(f.value.offset(), "values must be a map"));
            };
            for (k, v) in entries {
                let idx = self.index_tuple(k, rank)?;
                if idx.len() != degree {
                    return Err(self.at(k.offset(), format!("expected {degree} indices")));
                }
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != degree {
                    return Err(self.at(k.offset(), "repeated index"));
                }
                c.set(&idx, self.poly(v)?);
            }
        }
        self.ws.cochains.insert(b.name.clone(), NamedCochain { cochain: c, on });
        Ok(())
    }

    fn named_cochain(&self, v: &Value) -> Result<&NamedCochain, CliError> {
        let id = self.atom(v)?;
        self.ws.cochains.get(id).ok_or_else(|| self.unresolved(v.offset(), "cochain", id))
    }

    fn named_lr(&self, id: &str, offset: usize) -> Result<LieRinehartPresentation, CliError> {
        if id == DER {
            return Ok(LieRinehartPresentation::derivations(self.ws.nvars));
        }
        self.ws.lie_rinehart.get(id).cloned().ok_or_else(|| self.unresolved(offset, "lie_rinehart", id))
    }

    fn dlie(&mut self, b: &Block) -> Result<(), CliError> {
        let t = if let Some(f) = b.field("from") {
            let text = self.atom(&f.value)?;
            let inner = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(text);
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            let [l, c] = parts[..] else {
                return Err(self.at(f.value.offset(), "from = (lie_rinehart, cocycle)"));
            };
            let lr = self.named_lr(l, f.value.offset())?;
            let nc = self.ws.cochains.get(c).ok_or_else(|| self.unresolved(f.value.offset(), "cochain", c))?;
            if nc.on == DER {
                DLieAlgebra::build_extension(&lr, &nc.cochain)
            } else if nc.on == l {
                DLieAlgebra::build_extension_with(&lr, &nc.cochain)
            } else {
                return Err(self.at(f.value.offset(), format!("cochain '{c}' lives on '{}', not on Der or '{l}'", nc.on)));
            }
            .map_err(|e| self.core(f.value.offset(), e))?
        } else {
            let v = self.required(b, "d1f")?;
            let nc = self.named_cochain(v)?;
            DLieAlgebra::d1f(&nc.cochain).map_err(|e| self.core(v.offset(), e))?
        };
        self.ws.dlie.insert(b.name.clone(), t);
        Ok(())
    }

    fn named_dlie(&self, v: &Value) -> Result<DLieAlgebra, CliError> {
        let id = self.atom(v)?;
        self.ws.dlie.get(id).cloned().ok_or_else(|| self.unresolved(v.offset(), "dlie", id))
    }

    fn connection(&mut self, b: &Block) -> Result<(), CliError> {
        let t = self.named_dlie(self.required(b, "dlie")?)?;
        let gv = self.required(b, "gamma")?;
        let gammas: Vec<PolyMatrix> = self.list(gv)?.iter().map(|v| self.matrix(v)).collect::<Result<_, _>>()?;
        let rank = match (self.usize_field(b, "rank")?, gammas.first()) {
            (Some(r), _) => r,
            (None, Some(g)) => g.rows(),
            (None, None) => return Err(self.at(b.offset, "connection needs 'rank' or 'gamma'")),
        };
        let gammas = if gammas.is_empty() { vec![PolyMatrix::zero(rank, rank, self.ws.nvars); t.n()] } else { gammas };
        let psi = match b.field("psi") {
            None => PolyMatrix::identity(rank, self.ws.nvars),
            Some(f) => match &f.value {
                Value::Atom { text, .. } if text == "Id" => PolyMatrix::identity(rank, self.ws.nvars),
                Value::Atom { .. } => PolyMatrix::scalar(rank, &self.poly(&f.value)?),
                v => self.matrix(v)?,
            },
        };
        let c = Connection::new(t, gammas, psi).map_err(|e| self.core(gv.offset(), e))?;
        self.ws.connections.insert(b.name.clone(), c);
        Ok(())
    }

    fn projective_basis(&mut self, b: &Block) -> Result<(), CliError> {
        let pb = if let Some(r) = self.usize_field(b, "free")? {
            ProjectiveBasis::free(r, self.ws.nvars)
        } else if let Some(f) = b.field("idempotent") {
            ProjectiveBasis::from_idempotent(&self.matrix(&f.value)?).map_err(|e| self.core(f.value.offset(), e))?
        } else {
            let u = self.matrix(self.required(b, "u")?)?;
            let w = self.matrix(self.required(b, "w")?)?;
            if u.cols() != w.rows() {
                return Err(self.at(b.offset, "u and w cannot be multiplied"));
            }
            ProjectiveBasis::from_idempotent(&(&u * &w)).map_err(|e| self.core(b.offset, e))?
        };
        self.ws.bases.insert(b.name.clone(), pb);
        Ok(())
    }

    fn morphism(&mut self, b: &Block) -> Result<(), CliError> {
        let sv = self.required(b, "source")?;
        let tv = self.required(b, "target")?;
        let source = self.atom(sv)?.to_string();
        let target = self.atom(tv)?.to_string();
        let src = self.named_dlie(sv)?;
        self.named_dlie(tv)?;
        let morphism = if let Some(f) = b.field("cohomologous") {
            DLieMorphism::cohomologous(&self.named_cochain(&f.value)?.cochain)
        } else if let Some(f) = b.field("images") {
            let images: Vec<Combination> = self.list(&f.value)?.iter().map(|v| self.polys(v).map(Combination)).collect::<Result<_, _>>()?;
            DLieMorphism::from_lie_rinehart(&images)
        } else {
            DLieMorphism::identity(&src)
        };
        self.ws.morphisms.insert(b.name.clone(), NamedMorphism { morphism, source, target });
        Ok(())
    }
}

const ORDER: [&str; 6] = ["lie_rinehart", "cochain", "dlie", "connection", "projective_basis", "morphism"];

/// Builds every block, dependencies first (block kinds are resolved in a
/// fixed order, so definitions may appear anywhere in the file).
pub fn build(file: &ProblemFile) -> Result<Workspace, CliError> {
    let mut ctx = Ctx { file, ws: Workspace { nvars: file.nvars, ..Default::default() } };
    let mut seen = std::collections::BTreeSet::new();
    for b in &file.blocks {
        if !seen.insert(b.name.as_str()) {
            return Err(ctx.at(b.offset, format!("name '{}' defined twice", b.name)));
        }
    }
    for kind in ORDER {
        for b in file.blocks.iter().filter(|b| b.kind == kind) {
            match kind {
                "lie_rinehart" => ctx.lie_rinehart(b)?,
                "cochain" => ctx.cochain(b)?,
                "dlie" => ctx.dlie(b)?,
                "connection" => ctx.connection(b)?,
                "projective_basis" => ctx.projective_basis(b)?,
                _ => ctx.morphism(b)?,
            }
        }
    }
    Ok(ctx.ws)
}

impl Workspace {
    /// The bundled example library under fixed names.
    pub fn library() -> Self {
        let mut ws = Workspace { nvars: 2, ..Default::default() };
        for e in library::lr_examples() {
            if let Ok(t) = e.extension() {
                ws.dlie.insert(e.name.to_string(), t);
            }
            ws.lie_rinehart.insert(e.name.to_string(), e.lr);
        }
        let mut conns = library::connections();
        for n in [4, 6] {
            for scalar in [true, false] {
                let mut c = library::chern_example(n, scalar);
                c.name = match (n, scalar) {
                    (4, true) => "chern_scalar_4",
                    (4, false) => "chern_split_4",
                    (_, true) => "chern_scalar_6",
                    _ => "chern_split_6",
                };
                conns.push(c);
            }
        }
        for c in conns {
            if let Some(f) = c.curvature_type {
                ws.cochains.insert(format!("{}_f", c.name), NamedCochain { cochain: f, on: c.name.to_string() });
            }
            ws.connections.insert(c.name.to_string(), c.connection);
        }
        for (name, pb) in library::projective_bases() {
            ws.bases.insert(name.to_string(), pb);
        }
        ws
    }
}
