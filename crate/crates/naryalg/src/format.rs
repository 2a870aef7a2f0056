//! The structure-file format: a strict, line-oriented text format with
//! explicit rational coefficients (no floats anywhere). Grammar, one
//! directive per line, `#` starts a comment:
//!
//! ```text
//! naryalg v1
//! grading <rank>
//! form <0/1 ... rank entries>            # rank rows, symmetric
//! space <name> <dim>
//! degree <space> <idx> : <int ...>       # required when rank > 0
//! label <space> <idx> : <token>
//! espace <name> <base> <fiber>           # two-level extension space
//! map <name> <space> <arity> [: <weight ints>]
//! entry <name> <inputs ...> : (<out-idx> <rational>)+
//! lmap <name> <domain> <codomain> [: <degree ints>]
//! col <name> <col-idx> : (<row-idx> <rational>)+
//! subspace <name> <space>
//! svec <name> : (<idx> <rational>)+
//! declare algebra <map> <assoc|lie|filippov>
//! declare module <map> <assoc|lie>
//! declare unit : (<idx> <rational>)+
//! expect <check> <pass|fail|...>         # declared checks, see below
//! ```
//!
//! Expectations: `expect assoc pass|fail`, `expect lie pass|fail`,
//! `expect filippov pass|fail`, `expect module pass|fail`,
//! `expect ideal <subspace> pass|fail`, `expect unit <left|right|none>...`,
//! `expect cohomology <hochschild|chevalley> kmax <k> : <dim ...>`.
//!
//! Maps on an extension space use the folded weight (`rank+1` integers,
//! fiber level first). `emit` produces a canonical byte-stable rendering.

use std::sync::Arc;

use crate::cohomology::Flavor;
use crate::error::{Error, Result};
use crate::grading::{Degree, GradingGroup};
use crate::linalg::{GradedSpace, LinearMap, Vector};
use crate::multilinear::MultiMap;
use crate::scalar::{format_rat, parse_rat, Rat};
use crate::structures::{ExtensionSpace, ModuleFlavor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraFlavor {
    Associative,
    Lie,
    Filippov,
}

impl AlgebraFlavor {
    pub fn token(&self) -> &'static str {
        match self {
            AlgebraFlavor::Associative => "assoc",
            AlgebraFlavor::Lie => "lie",
            AlgebraFlavor::Filippov => "filippov",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expectation {
    Assoc(bool),
    Lie(bool),
    Filippov(bool),
    Module(bool),
    Ideal(String, bool),
    Unit { left: bool, right: bool },
    Cohomology { flavor: Flavor, kmax: usize, dims: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct NamedMap {
    pub space: String,
    pub map: MultiMap,
}

#[derive(Clone, Debug)]
pub struct NamedLinearMap {
    pub domain: String,
    pub codomain: String,
    pub map: LinearMap,
}

/// A parsed structure file. Orders are preserved for canonical emission.
#[derive(Clone, Debug, Default)]
pub struct StructureFile {
    pub group: GradingGroup,
    pub spaces: Vec<(String, Arc<GradedSpace>)>,
    pub espaces: Vec<(String, ExtensionSpace)>,
    pub maps: Vec<(String, NamedMap)>,
    pub lmaps: Vec<(String, NamedLinearMap)>,
    pub subspaces: Vec<(String, (String, Vec<Vector>))>,
    pub algebra: Option<(String, AlgebraFlavor)>,
    pub module: Option<(String, ModuleFlavor)>,
    pub unit: Option<Vec<(usize, Rat)>>,
    pub expectations: Vec<Expectation>,
}

impl StructureFile {
    pub fn space(&self, name: &str) -> Result<Arc<GradedSpace>> {
        if let Some((_, s)) = self.spaces.iter().find(|(n, _)| n == name) {
            return Ok(s.clone());
        }
        if let Some((_, e)) = self.espaces.iter().find(|(n, _)| n == name) {
            return Ok(e.total.clone());
        }
        Err(Error::UnknownName(format!("space {name}")))
    }

    pub fn espace(&self, name: &str) -> Result<&ExtensionSpace> {
        self.espaces
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| Error::UnknownName(format!("extension space {name}")))
    }

    pub fn map(&self, name: &str) -> Result<&NamedMap> {
        self.maps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownName(format!("map {name}")))
    }

    pub fn lmap(&self, name: &str) -> Result<&NamedLinearMap> {
        self.lmaps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownName(format!("linear map {name}")))
    }

    pub fn subspace(&self, name: &str) -> Result<&(String, Vec<Vector>)> {
        self.subspaces
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownName(format!("subspace {name}")))
    }

    pub fn declared_algebra(&self) -> Result<(&NamedMap, &AlgebraFlavor)> {
        let (name, flavor) = self
            .algebra
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("no algebra declared".into()))?;
        Ok((self.map(name)?, flavor))
    }

    pub fn declared_module(&self) -> Result<(&NamedMap, ModuleFlavor, &ExtensionSpace)> {
        let (name, flavor) = self
            .module
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("no module declared".into()))?;
        let m = self.map(name)?;
        let ext = self.espace(&m.space)?;
        Ok((m, *flavor, ext))
    }

    pub fn unit_vector(&self) -> Result<Option<Vector>> {
        let Some(pairs) = &self.unit else {
            return Ok(None);
        };
        let (alg, _) = self.declared_algebra()?;
        let mut v = alg.map.space().zero_vector();
        for (i, c) in pairs {
            if *i >= v.dim() {
                return Err(Error::DimensionMismatch("unit index out of range".into()));
            }
            v.coeffs[*i] = c.clone();
        }
        Ok(Some(v))
    }
}

struct LineParser<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        let t = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        let t = self.next(what)?;
        t.parse()
            .map_err(|_| self.err(format!("expected {what}, got {t:?}")))
    }

    fn next_i64(&mut self, what: &str) -> Result<i64> {
        let t = self.next(what)?;
        t.parse()
            .map_err(|_| self.err(format!("expected {what}, got {t:?}")))
    }

    fn next_rat(&mut self, what: &str) -> Result<Rat> {
        let t = self.next(what)?;
        parse_rat(t).ok_or_else(|| self.err(format!("expected {what}, got {t:?}")))
    }

    fn expect_colon(&mut self) -> Result<()> {
        let t = self.next("':'")?;
        if t != ":" {
            return Err(self.err(format!("expected ':', got {t:?}")));
        }
        Ok(())
    }

    fn has_more(&self) -> bool {
        self.pos < self.tokens.len()
    }

    fn rest_pairs(&mut self) -> Result<Vec<(usize, Rat)>> {
        let mut out = Vec::new();
        while self.has_more() {
            let idx = self.next_usize("index")?;
            let c = self.next_rat("rational")?;
            out.push((idx, c));
        }
        Ok(out)
    }

    fn done(&self) -> Result<()> {
        if self.has_more() {
            return Err(self.err(format!(
                "trailing tokens: {:?}",
                &self.tokens[self.pos..]
            )));
        }
        Ok(())
    }
}

/// Parses a structure file, validating indices, symmetry of the form and
/// homogeneity of every map entry. The first failing line is reported.
pub fn parse(text: &str) -> Result<StructureFile> {
    let mut sf = StructureFile::default();
    let mut rank: Option<usize> = None;
    let mut form_rows: Vec<Vec<u8>> = Vec::new();
    let mut header_seen = false;
    // staging: spaces collect degrees and labels until first use
    struct SpaceDecl {
        dim: usize,
        degrees: Vec<Option<Degree>>,
        labels: Vec<Option<String>>,
    }
    let mut staged: Vec<(String, SpaceDecl)> = Vec::new();
    let mut finalized = false;

    let finalize_spaces = |sf: &mut StructureFile,
                           staged: &mut Vec<(String, SpaceDecl)>,
                           group: &GradingGroup,
                           line: usize|
     -> Result<()> {
        for (name, decl) in staged.drain(..) {
            let mut degrees = Vec::with_capacity(decl.dim);
            for (i, d) in decl.degrees.into_iter().enumerate() {
                match d {
                    Some(d) => degrees.push(d),
                    None if group.rank() == 0 => degrees.push(Degree::zero(0)),
                    None => {
                        return Err(Error::Parse {
                            line,
                            msg: format!("space {name}: missing degree for basis element {i}"),
                        })
                    }
                }
            }
            let space = if decl.labels.iter().all(|l| l.is_some()) && decl.dim > 0 {
                GradedSpace::with_labels(
                    group.clone(),
                    degrees,
                    decl.labels.into_iter().map(|l| l.unwrap()).collect(),
                )?
            } else {
                GradedSpace::new(group.clone(), degrees)?
            };
            sf.spaces.push((name, space));
        }
        Ok(())
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            tokens,
            pos: 0,
            line,
        };
        let keyword = p.next("directive")?;
        if !header_seen {
            if keyword != "naryalg" {
                return Err(p.err("file must start with `naryalg v1`"));
            }
            let v = p.next("version")?;
            if v != "v1" {
                return Err(p.err(format!("unsupported version {v:?}")));
            }
            p.done()?;
            header_seen = true;
            continue;
        }
        match keyword {
            "grading" => {
                if rank.is_some() {
                    return Err(p.err("duplicate grading directive"));
                }
                rank = Some(p.next_usize("rank")?);
                p.done()?;
            }
            "form" => {
                let r = rank.ok_or_else(|| p.err("form before grading"))?;
                let mut row = Vec::with_capacity(r);
                for _ in 0..r {
                    let v = p.next_usize("form entry")?;
                    if v > 1 {
                        return Err(p.err("form entries are 0 or 1"));
                    }
                    row.push(v as u8);
                }
                p.done()?;
                form_rows.push(row);
            }
            "space" => {
                let name = p.next("space name")?.to_string();
                let dim = p.next_usize("dimension")?;
                p.done()?;
                staged.push((
                    name,
                    SpaceDecl {
                        dim,
                        degrees: vec![None; dim],
                        labels: vec![None; dim],
                    },
                ));
            }
            "degree" => {
                let name = p.next("space name")?;
                let idx = p.next_usize("basis index")?;
                p.expect_colon()?;
                let r = rank.unwrap_or(0);
                let mut coords = Vec::with_capacity(r);
                for _ in 0..r {
                    coords.push(p.next_i64("degree coordinate")?);
                }
                p.done()?;
                let decl = staged
                    .iter_mut()
                    .find(|(n, _)| n == name)
                    .map(|(_, d)| d)
                    .ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("degree for undeclared space {name}"),
                    })?;
                if idx >= decl.dim {
                    return Err(Error::Parse {
                        line,
                        msg: format!("basis index {idx} out of range"),
                    });
                }
                decl.degrees[idx] = Some(Degree(coords));
            }
            "label" => {
                let name = p.next("space name")?;
                let idx = p.next_usize("basis index")?;
                p.expect_colon()?;
                let label = p.next("label")?.to_string();
                p.done()?;
                let decl = staged
                    .iter_mut()
                    .find(|(n, _)| n == name)
                    .map(|(_, d)| d)
                    .ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("label for undeclared space {name}"),
                    })?;
                if idx >= decl.dim {
                    return Err(Error::Parse {
                        line,
                        msg: format!("basis index {idx} out of range"),
                    });
                }
                decl.labels[idx] = Some(label);
            }
            _ => {
                // first non-declaration directive: freeze grading and spaces
                if !finalized {
                    let r = rank.unwrap_or(0);
                    if form_rows.len() != r {
                        return Err(Error::Parse {
                            line,
                            msg: format!("expected {r} form rows, found {}", form_rows.len()),
                        });
                    }
                    sf.group = if r == 0 {
                        GradingGroup::trivial()
                    } else {
                        GradingGroup::new(form_rows.clone())
                            .map_err(|e| Error::Parse { line, msg: e.to_string() })?
                    };
                    let group = sf.group.clone();
                    finalize_spaces(&mut sf, &mut staged, &group, line)?;
                    finalized = true;
                }
                parse_body_directive(&mut sf, keyword, &mut p)?;
            }
        }
    }
    if !header_seen {
        return Err(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        });
    }
    if !finalized {
        let r = rank.unwrap_or(0);
        if form_rows.len() != r {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {r} form rows, found {}", form_rows.len()),
            });
        }
        sf.group = if r == 0 {
            GradingGroup::trivial()
        } else {
            GradingGroup::new(form_rows).map_err(|e| Error::Parse {
                line: text.lines().count(),
                msg: e.to_string(),
            })?
        };
        let last = text.lines().count();
        let group = sf.group.clone();
        finalize_spaces(&mut sf, &mut staged, &group, last)?;
    }
    Ok(sf)
}

fn parse_body_directive(sf: &mut StructureFile, keyword: &str, p: &mut LineParser) -> Result<()> {
    match keyword {
        "espace" => {
            let name = p.next("espace name")?.to_string();
            let base = p.next("base space")?.to_string();
            let fiber = p.next("fiber space")?.to_string();
            p.done()?;
            let b = sf.space(&base).map_err(|e| p.err(e.to_string()))?;
            let f = sf.space(&fiber).map_err(|e| p.err(e.to_string()))?;
            let e = ExtensionSpace::new(b, f).map_err(|e| p.err(e.to_string()))?;
            sf.espaces.push((name, e));
        }
        "map" => {
            let name = p.next("map name")?.to_string();
            let space_name = p.next("space name")?.to_string();
            let arity = p.next_usize("arity")?;
            let space = sf.space(&space_name).map_err(|e| p.err(e.to_string()))?;
            let wrank = space.group().rank();
            let weight = if p.has_more() {
                p.expect_colon()?;
                let mut coords = Vec::with_capacity(wrank);
                for _ in 0..wrank {
                    coords.push(p.next_i64("weight coordinate")?);
                }
                p.done()?;
                Degree(coords)
            } else {
                Degree::zero(wrank)
            };
            let map = MultiMap::zero(space, arity, weight).map_err(|e| p.err(e.to_string()))?;
            sf.maps.push((
                name,
                NamedMap {
                    space: space_name,
                    map,
                },
            ));
        }
        "entry" => {
            let name = p.next("map name")?.to_string();
            let nm = sf
                .maps
                .iter_mut()
                .find(|(n, _)| *n == name)
                .map(|(_, m)| m)
                .ok_or_else(|| p.err(format!("entry for undeclared map {name}")))?;
            let arity = nm.map.arity();
            let mut inputs = Vec::with_capacity(arity);
            for _ in 0..arity {
                inputs.push(p.next_usize("input index")?);
            }
            p.expect_colon()?;
            let pairs = p.rest_pairs()?;
            let mut value = nm.map.space().zero_vector();
            for (idx, c) in pairs {
                if idx >= value.dim() {
                    return Err(p.err(format!("output index {idx} out of range")));
                }
                value.coeffs[idx] = c;
            }
            nm.map
                .set_entry(inputs, value)
                .map_err(|e| p.err(e.to_string()))?;
        }
        "lmap" => {
            let name = p.next("lmap name")?.to_string();
            let dom_name = p.next("domain")?.to_string();
            let cod_name = p.next("codomain")?.to_string();
            let dom = sf.space(&dom_name).map_err(|e| p.err(e.to_string()))?;
            let cod = sf.space(&cod_name).map_err(|e| p.err(e.to_string()))?;
            let rank = dom.group().rank();
            let degree = if p.has_more() {
                p.expect_colon()?;
                let mut coords = Vec::with_capacity(rank);
                for _ in 0..rank {
                    coords.push(p.next_i64("degree coordinate")?);
                }
                p.done()?;
                Some(Degree(coords))
            } else {
                Some(Degree::zero(rank))
            };
            let mut map = LinearMap::zero(dom, cod);
            map.degree = degree;
            sf.lmaps.push((
                name,
                NamedLinearMap {
                    domain: dom_name,
                    codomain: cod_name,
                    map,
                },
            ));
        }
        "col" => {
            let name = p.next("lmap name")?.to_string();
            let col = p.next_usize("column index")?;
            p.expect_colon()?;
            let pairs = p.rest_pairs()?;
            let nm = sf
                .lmaps
                .iter_mut()
                .find(|(n, _)| *n == name)
                .map(|(_, m)| m)
                .ok_or_else(|| p.err(format!("col for undeclared lmap {name}")))?;
            if col >= nm.map.domain.dim() {
                return Err(p.err(format!("column {col} out of range")));
            }
            for (row, c) in pairs {
                if row >= nm.map.codomain.dim() {
                    return Err(p.err(format!("row {row} out of range")));
                }
                nm.map.matrix[row][col] = c;
            }
        }
        "subspace" => {
            let name = p.next("subspace name")?.to_string();
            let space = p.next("space name")?.to_string();
            p.done()?;
            sf.space(&space).map_err(|e| p.err(e.to_string()))?;
            sf.subspaces.push((name, (space, Vec::new())));
        }
        "svec" => {
            let name = p.next("subspace name")?.to_string();
            p.expect_colon()?;
            let pairs = p.rest_pairs()?;
            let space_name = sf
                .subspaces
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, (s, _))| s.clone())
                .ok_or_else(|| p.err(format!("svec for undeclared subspace {name}")))?;
            let space = sf.space(&space_name).map_err(|e| p.err(e.to_string()))?;
            let mut v = space.zero_vector();
            for (idx, c) in pairs {
                if idx >= v.dim() {
                    return Err(p.err(format!("index {idx} out of range")));
                }
                v.coeffs[idx] = c;
            }
            sf.subspaces
                .iter_mut()
                .find(|(n, _)| *n == name)
                .unwrap()
                .1
                 .1
                .push(v);
        }
        "declare" => {
            let what = p.next("declaration kind")?;
            match what {
                "algebra" => {
                    let name = p.next("map name")?.to_string();
                    let flavor = match p.next("flavor")? {
                        "assoc" => AlgebraFlavor::Associative,
                        "lie" => AlgebraFlavor::Lie,
                        "filippov" => AlgebraFlavor::Filippov,
                        other => return Err(p.err(format!("unknown flavor {other:?}"))),
                    };
                    p.done()?;
                    sf.map(&name).map_err(|e| p.err(e.to_string()))?;
                    sf.algebra = Some((name, flavor));
                }
                "module" => {
                    let name = p.next("map name")?.to_string();
                    let flavor = match p.next("flavor")? {
                        "assoc" => ModuleFlavor::Associative,
                        "lie" => ModuleFlavor::Lie,
                        other => return Err(p.err(format!("unknown flavor {other:?}"))),
                    };
                    p.done()?;
                    let m = sf.map(&name).map_err(|e| p.err(e.to_string()))?;
                    let espace_name = m.space.clone();
                    sf.espace(&espace_name).map_err(|e| {
                        p.err(format!("module map must live on an espace: {e}"))
                    })?;
                    sf.module = Some((name, flavor));
                }
                "unit" => {
                    p.expect_colon()?;
                    let pairs = p.rest_pairs()?;
                    sf.unit = Some(pairs);
                }
                other => return Err(p.err(format!("unknown declaration {other:?}"))),
            }
        }
        "expect" => {
            let what = p.next("expectation kind")?;
            let parse_verdict = |p: &mut LineParser| -> Result<bool> {
                match p.next("pass|fail")? {
                    "pass" => Ok(true),
                    "fail" => Ok(false),
                    other => Err(p.err(format!("expected pass or fail, got {other:?}"))),
                }
            };
            let e = match what {
                "assoc" => Expectation::Assoc(parse_verdict(p)?),
                "lie" => Expectation::Lie(parse_verdict(p)?),
                "filippov" => Expectation::Filippov(parse_verdict(p)?),
                "module" => Expectation::Module(parse_verdict(p)?),
                "ideal" => {
                    let name = p.next("subspace name")?.to_string();
                    Expectation::Ideal(name, parse_verdict(p)?)
                }
                "unit" => {
                    let mut left = false;
                    let mut right = false;
                    while p.has_more() {
                        match p.next("left|right|none")? {
                            "left" => left = true,
                            "right" => right = true,
                            "none" => {}
                            other => return Err(p.err(format!("unknown side {other:?}"))),
                        }
                    }
                    Expectation::Unit { left, right }
                }
                "cohomology" => {
                    let flavor = match p.next("flavor")? {
                        "hochschild" => Flavor::Hochschild,
                        "chevalley" => Flavor::Chevalley,
                        other => return Err(p.err(format!("unknown flavor {other:?}"))),
                    };
                    let kw = p.next("kmax")?;
                    if kw != "kmax" {
                        return Err(p.err("expected `kmax`"));
                    }
                    let kmax = p.next_usize("kmax value")?;
                    p.expect_colon()?;
                    let mut dims = Vec::new();
                    while p.has_more() {
                        dims.push(p.next_usize("dimension")?);
                    }
                    if dims.len() != kmax + 1 {
                        return Err(p.err(format!(
                            "expected {} dimensions, found {}",
                            kmax + 1,
                            dims.len()
                        )));
                    }
                    Expectation::Cohomology { flavor, kmax, dims }
                }
                other => return Err(p.err(format!("unknown expectation {other:?}"))),
            };
            p.done()?;
            sf.expectations.push(e);
        }
        other => {
            return Err(p.err(format!("unknown directive {other:?}")));
        }
    }
    Ok(())
}

fn emit_pairs(out: &mut String, v: &Vector) {
    for (i, c) in v.coeffs.iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            out.push_str(&format!(" {} {}", i, format_rat(c)));
        }
    }
}

/// Canonical rendering; `parse(emit(sf))` reconstructs an equal object and
/// `emit` is byte-stable under re-emission.
pub fn emit(sf: &StructureFile) -> String {
    let mut out = String::from("naryalg v1\n");
    out.push_str(&format!("grading {}\n", sf.group.rank()));
    for row in sf.group.form() {
        out.push_str("form");
        for &v in row {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    for (name, space) in &sf.spaces {
        out.push_str(&format!("space {name} {}\n", space.dim()));
        if space.group().rank() > 0 {
            for i in 0..space.dim() {
                out.push_str(&format!("degree {name} {i} :"));
                for c in &space.degree(i).0 {
                    out.push_str(&format!(" {c}"));
                }
                out.push('\n');
            }
        }
        if let Some(labels) = space.labels() {
            for (i, l) in labels.iter().enumerate() {
                out.push_str(&format!("label {name} {i} : {l}\n"));
            }
        }
    }
    for (name, e) in &sf.espaces {
        let base = sf
            .spaces
            .iter()
            .find(|(_, s)| *s == e.base)
            .map(|(n, _)| n.clone())
            .unwrap_or_default();
        let fiber = sf
            .spaces
            .iter()
            .find(|(_, s)| *s == e.fiber)
            .map(|(n, _)| n.clone())
            .unwrap_or_default();
        out.push_str(&format!("espace {name} {base} {fiber}\n"));
    }
    for (name, nm) in &sf.maps {
        out.push_str(&format!("map {name} {} {}", nm.space, nm.map.arity()));
        if !nm.map.weight().is_zero() || nm.map.weight().rank() > 0 {
            out.push_str(" :");
            for c in &nm.map.weight().0 {
                out.push_str(&format!(" {c}"));
            }
        }
        out.push('\n');
        for (t, v) in nm.map.entries() {
            out.push_str(&format!("entry {name}"));
            for i in t {
                out.push_str(&format!(" {i}"));
            }
            out.push_str(" :");
            emit_pairs(&mut out, v);
            out.push('\n');
        }
    }
    for (name, nm) in &sf.lmaps {
        out.push_str(&format!("lmap {name} {} {}", nm.domain, nm.codomain));
        if let Some(d) = &nm.map.degree {
            out.push_str(" :");
            for c in &d.0 {
                out.push_str(&format!(" {c}"));
            }
        }
        out.push('\n');
        for col in 0..nm.map.domain.dim() {
            let v = nm.map.column(col);
            if !v.is_zero() {
                out.push_str(&format!("col {name} {col} :"));
                emit_pairs(&mut out, &v);
                out.push('\n');
            }
        }
    }
    for (name, (space, vecs)) in &sf.subspaces {
        out.push_str(&format!("subspace {name} {space}\n"));
        for v in vecs {
            out.push_str(&format!("svec {name} :"));
            emit_pairs(&mut out, v);
            out.push('\n');
        }
    }
    if let Some((name, flavor)) = &sf.algebra {
        out.push_str(&format!("declare algebra {name} {}\n", flavor.token()));
    }
    if let Some((name, flavor)) = &sf.module {
        let token = match flavor {
            ModuleFlavor::Associative => "assoc",
            ModuleFlavor::Lie => "lie",
        };
        out.push_str(&format!("declare module {name} {token}\n"));
    }
    if let Some(pairs) = &sf.unit {
        out.push_str("declare unit :");
        for (i, c) in pairs {
            out.push_str(&format!(" {} {}", i, format_rat(c)));
        }
        out.push('\n');
    }
    for e in &sf.expectations {
        match e {
            Expectation::Assoc(v) => {
                out.push_str(&format!("expect assoc {}\n", if *v { "pass" } else { "fail" }))
            }
            Expectation::Lie(v) => {
                out.push_str(&format!("expect lie {}\n", if *v { "pass" } else { "fail" }))
            }
            Expectation::Filippov(v) => out.push_str(&format!(
                "expect filippov {}\n",
                if *v { "pass" } else { "fail" }
            )),
            Expectation::Module(v) => out.push_str(&format!(
                "expect module {}\n",
                if *v { "pass" } else { "fail" }
            )),
            Expectation::Ideal(name, v) => out.push_str(&format!(
                "expect ideal {name} {}\n",
                if *v { "pass" } else { "fail" }
            )),
            Expectation::Unit { left, right } => {
                out.push_str("expect unit");
                if *left {
                    out.push_str(" left");
                }
                if *right {
                    out.push_str(" right");
                }
                if !left && !right {
                    out.push_str(" none");
                }
                out.push('\n');
            }
            Expectation::Cohomology { flavor, kmax, dims } => {
                let f = match flavor {
                    Flavor::Hochschild => "hochschild",
                    Flavor::Chevalley => "chevalley",
                };
                out.push_str(&format!("expect cohomology {f} kmax {kmax} :"));
                for d in dims {
                    out.push_str(&format!(" {d}"));
                }
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_parses() {
        let text = "naryalg v1\ngrading 0\nspace V 1\nmap mu V 2\n";
        let sf = parse(text).unwrap();
        assert_eq!(sf.spaces.len(), 1);
        assert_eq!(sf.maps.len(), 1);
        assert!(sf.map("mu").unwrap().map.is_zero());
    }

    #[test]
    fn homogeneity_violation_rejected_with_line() {
        let text = "naryalg v1\ngrading 1\nform 1\nspace V 2\ndegree V 0 : 0\ndegree V 1 : 1\nmap mu V 2\nentry mu 0 0 : 1 1\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn emit_parse_round_trip() {
        let text = "naryalg v1\ngrading 1\nform 1\nspace V 2\ndegree V 0 : 0\ndegree V 1 : 1\nmap mu V 3 : 1\nentry mu 0 0 0 : 1 1\ndeclare algebra mu assoc\nexpect assoc pass\n";
        let sf = parse(text).unwrap();
        let emitted = emit(&sf);
        let sf2 = parse(&emitted).unwrap();
        let emitted2 = emit(&sf2);
        assert_eq!(emitted, emitted2, "emission is byte-stable");
        assert_eq!(sf.expectations, sf2.expectations);
        assert_eq!(sf.map("mu").unwrap().map, sf2.map("mu").unwrap().map);
    }

    #[test]
    fn unknown_directive_reports_line() {
        let text = "naryalg v1\ngrading 0\nspace V 1\nfrobnicate\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_entry_rejected() {
        let text = "naryalg v1\ngrading 0\nspace V 2\nmap mu V 2\nentry mu 0 5 : 0 1\n";
        assert!(parse(text).is_err());
    }
}
