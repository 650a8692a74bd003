use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use num_complex::Complex64;
use num_traits::Signed;
use serde_json::{json, Value};

use landau_core::fixtures;
use landau_core::graph::{
    build_routing_default, loop_gram_matrix, spanning_trees, symanzik_first, symanzik_vars, FeynmanGraph,
};
use landau_core::landau::{Chart, Disjunct, LandauSystem};
use landau_core::point::{complete_point, format_point, parse_grid, parse_point, to_complex, ExactPoint};
use landau_core::quadform::{Classification, ProjectiveIntegral, QuadricFile};
use landau_core::regularize::{certify_positive_for_all_eps, regularize_integral};
use landau_core::renorm::{birkhoff, physical_limit, CharacterFile, Hopf, SchemeFile};
use landau_core::solver::{is_physical, membership_test, scan, SolveConfig, WitnessFile};
use landau_core::{Error, ParseError, Result};

use crate::manifest::{embed, RunManifest};
use crate::{Cli, Command, LandauCommand, SolverFlags};

pub struct Output {
    pub text: String,
    pub status: u8,
    /// Side files, written only on a live run.
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    fn report(text: String) -> Self {
        Output { text, status: 0, files: Vec::new() }
    }
}

enum Input {
    Graph(FeynmanGraph),
    Quadrics(QuadricFile),
    System(LandauSystem),
}

/// Turn a parse error inside a multi-line file into one naming the file, line and column.
fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(p) if p.input.contains('\n') => {
            let before = &p.input[..p.offset.min(p.input.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            Error::Parse(ParseError {
                input: path.display().to_string(),
                offset: p.offset,
                message: format!("{} (line {line}, column {column})", p.message),
            })
        }
        other => other,
    }
}

struct Ctx {
    manifest: RunManifest,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes =
            fs::read(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        self.manifest.record(path, &bytes);
        String::from_utf8(bytes).map_err(|_| Error::Invalid(format!("{} is not UTF-8", path.display())))
    }

    /// File text with any embedded manifest removed.
    fn read_json(&mut self, path: &Path) -> Result<(String, Value)> {
        let text = self.read(path)?;
        let mut value: Value = serde_json::from_str(&text).map_err(|e| {
            let offset: usize = text.lines().take(e.line().saturating_sub(1)).map(|l| l.len() + 1).sum::<usize>()
                + e.column().saturating_sub(1);
            Error::Parse(ParseError::new(&path.display().to_string(), offset, &e.to_string()))
        })?;
        let had_manifest = value.as_object_mut().is_some_and(|o| o.shift_remove("manifest").is_some());
        let body = if had_manifest { serde_json::to_string_pretty(&value).expect("json serializes") } else { text };
        Ok((body, value))
    }

    fn load(&mut self, path: &Path) -> Result<Input> {
        let (text, value) = self.read_json(path)?;
        let has = |k: &str| value.get(k).is_some();
        let input = if has("onshell") {
            LandauSystem::from_text(&text).map(Input::System)
        } else if has("quadrics") {
            QuadricFile::from_json(&text).map(Input::Quadrics)
        } else if has("edges") {
            FeynmanGraph::from_json(&text).map(Input::Graph)
        } else {
            Err(Error::Invalid(format!(
                "{}: expected a graph, quadric or Landau system file",
                path.display()
            )))
        };
        input.map_err(|e| located(path, e))
    }

    fn graph(&mut self, path: &Path) -> Result<FeynmanGraph> {
        match self.load(path)? {
            Input::Graph(g) => Ok(g),
            _ => Err(Error::Invalid(format!("{}: expected a graph file", path.display()))),
        }
    }

    fn integral(&mut self, path: &Path) -> Result<ProjectiveIntegral> {
        match self.load(path)? {
            Input::Graph(g) => ProjectiveIntegral::from_graph(&g),
            Input::Quadrics(q) => q.into_integral(),
            Input::System(_) => Err(Error::Invalid(format!("{}: expected a graph or quadric file", path.display()))),
        }
    }

    fn system(&mut self, path: &Path, chart: Chart) -> Result<LandauSystem> {
        match self.load(path)? {
            Input::System(s) => Ok(s),
            Input::Graph(g) => LandauSystem::generate(&ProjectiveIntegral::from_graph(&g)?, chart),
            Input::Quadrics(q) => LandauSystem::generate(&q.into_integral()?, chart),
        }
    }

    fn text(&self, body: String) -> Output {
        Output::report(self.manifest.header() + &body)
    }
}

pub fn run(cli: &Cli, args: &[String], live: bool) -> Result<Output> {
    let mut ctx = Ctx { manifest: RunManifest::new(args, cli.seed) };
    match &cli.command {
        Command::Route { graph } => route(&mut ctx, graph),
        Command::Symanzik { graph } => symanzik(&mut ctx, graph),
        Command::PowerCount { graph } => power_count(&mut ctx, graph),
        Command::Landau(cmd) => landau(&mut ctx, cmd, cli.seed),
        Command::Regularize { input, at } => regularize(&mut ctx, input, at.as_deref()),
        Command::Hopf { operation, graph } => hopf(&mut ctx, operation, graph),
        Command::Renorm { graph, character, scheme } => renorm(&mut ctx, graph, character, scheme),
        Command::Examples { name, output } => examples(name.as_deref(), output.as_deref()),
        Command::Replay { report } => replay(report, live),
    }
}

fn route(ctx: &mut Ctx, path: &Path) -> Result<Output> {
    let g = ctx.graph(path)?;
    let r = build_routing_default(&g)?;
    let mut out = String::new();
    writeln!(out, "base vertex: {}", g.vertices[r.base]).unwrap();
    writeln!(out, "loop momenta: {}", if r.loop_names.is_empty() { "-".into() } else { r.loop_names.join(" ") }).unwrap();
    let ext: Vec<String> =
        r.external_names.iter().zip(&r.external_vertices).map(|(n, &v)| format!("{n}@{}", g.vertices[v])).collect();
    writeln!(out, "external momenta: {}", if ext.is_empty() { "-".into() } else { ext.join(" ") }).unwrap();
    let rows: Vec<[String; 4]> = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let (a, b) = r.orientation[e];
            [edge.id.clone(), g.vertices[a].clone(), g.vertices[b].clone(), r.momentum_text(e)]
        })
        .collect();
    out.push_str(&table(&["edge", "from", "to", "momentum"], &rows));
    let holds = (0..g.num_vertices())
        .filter(|&v| v != r.base)
        .all(|v| {
            let (k, p) = r.conservation_at(v);
            k.iter().chain(&p).all(|&c| c == 0)
        });
    writeln!(out, "conservation away from the base: {}", if holds { "exact" } else { "VIOLATED" }).unwrap();
    Ok(ctx.text(out))
}

fn table<const N: usize>(head: &[&str; N], rows: &[[String; N]]) -> String {
    let mut width: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == N {
                s.push_str(c);
            } else {
                s.push_str(c);
                s.push_str(&" ".repeat(width[i] - c.chars().count() + 2));
            }
        }
        s + "\n"
    };
    let mut out = line(head.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn symanzik(ctx: &mut Ctx, path: &Path) -> Result<Output> {
    let g = ctx.graph(path)?;
    let u = symanzik_first(&g)?;
    let r = build_routing_default(&g)?;
    let det = loop_gram_matrix(&g, &r).determinant(&symanzik_vars(&g))?;
    let mut out = String::new();
    writeln!(out, "U = {u}").unwrap();
    writeln!(out, "spanning trees: {}", spanning_trees(&g).len()).unwrap();
    writeln!(out, "determinant check: {}", if det == u { "PASS" } else { "FAIL" }).unwrap();
    Ok(ctx.text(out))
}

fn edge_list(g: &FeynmanGraph, edges: &[usize]) -> String {
    edges.iter().map(|&e| g.edges[e].id.as_str()).collect::<Vec<_>>().join(",")
}

fn power_count(ctx: &mut Ctx, path: &Path) -> Result<Output> {
    let g = ctx.graph(path)?;
    let m = g.num_edges();
    if m > 24 {
        return Err(Error::Invalid(format!("power counting enumerates subgraphs; {m} edges is too many")));
    }
    let mut subs: Vec<Vec<usize>> = (1u32..(1u32 << m) - 1)
        .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|edges| {
            let s = g.edge_subgraph(edges);
            s.is_connected() && s.loops() >= 1 && s.is_one_pi()
        })
        .collect();
    subs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let all: Vec<usize> = (0..m).collect();
    let mut rows = vec![[edge_list(&g, &all), g.loops().to_string(), g.omega().to_string()]];
    let mut sub_divergent = Vec::new();
    for s in &subs {
        let sg = g.edge_subgraph(s);
        let w = sg.omega();
        if !w.is_negative() {
            sub_divergent.push(edge_list(&g, s));
        }
        rows.push([edge_list(&g, s), sg.loops().to_string(), w.to_string()]);
    }
    let mut out = String::new();
    writeln!(out, "dimension: {}", g.dimension).unwrap();
    out.push_str(&table(&["edges", "loops", "omega"], &rows));
    let verdict = if !g.omega().is_negative() {
        "not convergent (superficial)".to_string()
    } else if !sub_divergent.is_empty() {
        format!("not convergent (subgraphs {})", sub_divergent.join("; "))
    } else {
        "convergent".to_string()
    };
    writeln!(out, "verdict: {verdict}").unwrap();
    Ok(ctx.text(out))
}

fn solver_config(ctx: &mut Ctx, flags: &SolverFlags, seed: u64) -> Result<SolveConfig> {
    let base = match &flags.config {
        Some(p) => {
            let (text, _) = ctx.read_json(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?
        }
        None => SolveConfig::default(),
    };
    Ok(SolveConfig { seed, ..flags.apply(base) })
}

fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.to_string() }
    } else {
        format!("{x:.6e}")
    }
}

fn complex(z: Complex64) -> String {
    let im = num(z.im.abs());
    if z.im < 0.0 && im != "0" {
        format!("{}-{im}i", num(z.re))
    } else {
        format!("{}+{im}i", num(z.re))
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn point_at(sys: &LandauSystem, at: &str) -> Result<(ExactPoint, Vec<Complex64>)> {
    let pt = parse_point(at, &sys.params)?;
    let values = complete_point(&pt, &sys.params)?;
    let exact: ExactPoint = sys.params.iter().cloned().zip(values.iter().cloned()).collect();
    Ok((exact, to_complex(&values)))
}

fn landau(ctx: &mut Ctx, cmd: &LandauCommand, seed: u64) -> Result<Output> {
    match cmd {
        LandauCommand::Gen { input, chart } => {
            let sys = LandauSystem::generate(&ctx.integral(input)?, *chart)?;
            ctx.manifest.config = json!({"chart": chart.to_string()});
            let body = serde_json::to_value(sys.to_file()).expect("system serializes");
            Ok(Output::report(embed(&ctx.manifest, body)))
        }
        LandauCommand::Verify { system, witness, tau } => {
            let sys = match ctx.load(system)? {
                Input::System(s) => s,
                _ => return Err(Error::Invalid(format!("{}: expected a Landau system file", system.display()))),
            };
            let (text, _) = ctx.read_json(witness)?;
            let w = WitnessFile::from_json(&text).map_err(|e| located(witness, e))?.point()?;
            let cfg = SolveConfig { seed, tau: tau.unwrap_or(SolveConfig::default().tau), ..SolveConfig::default() };
            ctx.manifest.config = json!({"tau": cfg.tau});
            let report = sys.verify(&w, cfg.tau)?;
            let mut out = String::new();
            writeln!(out, "chart: {}", sys.chart).unwrap();
            let rows: Vec<[String; 4]> = report
                .forms
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let d = match f.disjunct {
                        Disjunct::AlphaZero => "alpha = 0",
                        Disjunct::OnShell => "on shell",
                        Disjunct::Both => "both",
                        Disjunct::Neither => "neither",
                    };
                    [(i + 1).to_string(), sci(f.alpha_abs), sci(f.onshell_residual), d.to_string()]
                })
                .collect();
            out.push_str(&table(&["form", "|alpha|", "on-shell", "disjunct"], &rows));
            for (name, r) in sys.row_vars.iter().zip(&report.rows) {
                writeln!(out, "gradient row {name}: {}", sci(*r)).unwrap();
            }
            if let Some(d) = report.dropped_row {
                writeln!(out, "dependent row: {}", sci(d)).unwrap();
            }
            writeln!(out, "alpha nonzero: {}", yes(report.alpha_nonzero)).unwrap();
            writeln!(out, "coordinates nonzero: {}", yes(report.coords_nonzero)).unwrap();
            writeln!(out, "residual: {}", sci(report.residual)).unwrap();
            writeln!(out, "verdict: {}", if report.verified { "verified" } else { "not verified" }).unwrap();
            if sys.kinematics.is_some() && report.verified {
                let p = is_physical(&sys, &w, &cfg)?;
                writeln!(out, "physical: {}", yes(p.physical)).unwrap();
            }
            Ok(ctx.text(out))
        }
        LandauCommand::Member { input, at, chart, expect, witness_out, solver } => {
            let sys = ctx.system(input, *chart)?;
            let cfg = solver_config(ctx, solver, seed)?;
            ctx.manifest.config = json!({"chart": sys.chart.to_string(), "solver": cfg});
            let (exact, params) = point_at(&sys, at)?;
            let report = membership_test(&sys, &params, &cfg)?;
            let mut out = String::new();
            writeln!(out, "chart: {}", sys.chart).unwrap();
            writeln!(out, "point: {}", format_point(&exact)).unwrap();
            writeln!(out, "result: {}", if report.member { "member" } else { "no-witness-found" }).unwrap();
            for w in &report.witnesses {
                let support: Vec<String> = w.support.iter().map(|i| (i + 1).to_string()).collect();
                writeln!(
                    out,
                    "witness: branch {} support {{{}}} draw {} start {} residual {}",
                    w.branch,
                    support.join(","),
                    w.redraw,
                    w.start,
                    sci(w.residual)
                )
                .unwrap();
                for (n, z) in sys.alpha.iter().zip(&w.point.alpha).chain(sys.coords.iter().zip(&w.point.coords)) {
                    writeln!(out, "  {n} = {}", complex(*z)).unwrap();
                }
                if sys.kinematics.is_some() {
                    let p = is_physical(&sys, &w.point, &cfg)?;
                    writeln!(out, "  physical: {}", yes(p.physical)).unwrap();
                }
            }
            let rows: Vec<[String; 7]> = report
                .branches
                .iter()
                .map(|b| {
                    let s: Vec<String> = b.support.iter().map(|i| i.to_string()).collect();
                    [
                        b.branch.to_string(),
                        format!("{{{}}}", s.join(",")),
                        b.draws.to_string(),
                        b.starts.to_string(),
                        b.newton_converged.to_string(),
                        sci(b.best_residual),
                        b.witnesses.to_string(),
                    ]
                })
                .collect();
            out.push_str(&table(&["branch", "support", "draws", "starts", "converged", "best", "witnesses"], &rows));
            let mut result = ctx.text(out);
            if let (Some(path), Some(w)) = (witness_out, report.witnesses.first()) {
                let body = serde_json::to_value(w.to_file(&sys)).expect("witness serializes");
                result.files.push((path.clone(), embed(&ctx.manifest, body)));
            }
            if expect.is_some() && !report.member {
                result.status = 4;
            }
            Ok(result)
        }
        LandauCommand::Scan { input, grid, chart, solver } => {
            let sys = ctx.system(input, *chart)?;
            let cfg = solver_config(ctx, solver, seed)?;
            ctx.manifest.config = json!({"chart": sys.chart.to_string(), "grid": grid, "solver": cfg});
            let points = parse_grid(grid, &sys.params)?;
            let mut exact = Vec::with_capacity(points.len());
            let mut values = Vec::with_capacity(points.len());
            for p in &points {
                let v = complete_point(p, &sys.params)?;
                exact.push(sys.params.iter().cloned().zip(v.iter().cloned()).collect::<ExactPoint>());
                values.push(to_complex(&v));
            }
            let reports = scan(&sys, &values, &cfg)?;
            let mut out = String::from("point\tmember\tbranch\tresidual\n");
            for (p, r) in exact.iter().zip(&reports) {
                let (branch, res) = match r.witnesses.first() {
                    Some(w) => (w.branch.to_string(), sci(w.residual)),
                    None => ("-".into(), "-".into()),
                };
                writeln!(out, "{}\t{}\t{branch}\t{res}", format_point(p), if r.member { "yes" } else { "no" }).unwrap();
            }
            let members = reports.iter().filter(|r| r.member).count();
            writeln!(out, "# members: {members} of {}", reports.len()).unwrap();
            Ok(ctx.text(out))
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn regularize(ctx: &mut Ctx, input: &Path, at: Option<&str>) -> Result<Output> {
    let integral = ctx.integral(input)?;
    ctx.manifest.config = json!({"at": at});
    let params: Vec<String> = integral.params.to_vec();
    let point = at.map(|a| parse_point(a, &params)).transpose()?;
    let reg = regularize_integral(&integral, point.as_deref())?;
    let mut out = String::new();
    if let Some(p) = &point {
        let verdict = match integral.classify(p) {
            Ok(Classification::Regular) => "regular".to_string(),
            Ok(Classification::QuasiRegular) => "quasi-regular".to_string(),
            Ok(Classification::Neither { reason }) => format!("neither ({reason})"),
            Err(_) => "not classified (point is incomplete)".to_string(),
        };
        writeln!(out, "point: {} is {verdict}", format_point(p)).unwrap();
    }
    let complete = point.as_ref().and_then(|p| complete_point(p, &params).ok());
    for (i, (f, r)) in integral.forms.iter().zip(&reg.regulators).enumerate() {
        writeln!(out, "form {}: {}", i + 1, f.to_polynomial()).unwrap();
        write!(out, "T =\n{}", r.diagonalization.basis).unwrap();
        let diag: Vec<String> = r.diagonalization.diagonal.iter().map(|d| d.to_string()).collect();
        writeln!(out, "diagonal: {}", diag.join("; ")).unwrap();
        let exc: Vec<String> = r.diagonalization.exceptional.iter().map(|d| d.to_string()).collect();
        writeln!(out, "exceptional locus: {}", if exc.is_empty() { "-".into() } else { exc.join("; ") }).unwrap();
        writeln!(out, "rank: {}", r.rank).unwrap();
        write!(out, "A =\n{}", r.a).unwrap();
        writeln!(out, "regularized: {}", reg.integral.forms[i].to_polynomial()).unwrap();
        if let Some(values) = &complete {
            let assign: Vec<(usize, _)> = values.iter().cloned().enumerate().collect();
            let exact: ExactPoint = params.iter().cloned().zip(values.iter().cloned()).collect();
            if let (Ok(m0), Some(a0)) = (f.matrix_at(&exact), r.a.substitute(&assign).to_exact()) {
                writeln!(out, "positive definite for every eps > 0: {}", yes(certify_positive_for_all_eps(&m0, &a0)))
                    .unwrap();
            }
        }
    }
    Ok(ctx.text(out))
}

fn hopf(ctx: &mut Ctx, operation: &str, path: &Path) -> Result<Output> {
    let g = ctx.graph(path)?;
    let mut h = Hopf::new();
    let key = h.register(&g)?;
    let name = h.name(&key);
    let line = if operation == "coproduct" {
        let t = h.coproduct_key(&key);
        format!("Δ({name}) = {}\n", h.render_tensor(&t))
    } else {
        let s = h.antipode_key(&key);
        format!("S({name}) = {}\n", h.render_sum(&s))
    };
    Ok(ctx.text(line + "where\n" + &h.legend()))
}

fn renorm(ctx: &mut Ctx, path: &Path, character: &Path, scheme: &Path) -> Result<Output> {
    let g = ctx.graph(path)?;
    let (ctext, _) = ctx.read_json(character)?;
    let cfile = CharacterFile::from_json(&ctext).map_err(|e| located(character, e))?;
    let (stext, _) = ctx.read_json(scheme)?;
    let sfile = SchemeFile::from_json(&stext).map_err(|e| located(scheme, e))?;
    let s = sfile.to_scheme()?;
    let [lo, hi] = sfile.window;
    let mut h = Hopf::new();
    let phi = cfile.to_character(&mut h)?;
    let key = h.register(&g)?;
    let (minus, plus) = birkhoff(&phi, &s, &mut h, &g)?;
    let mut out = String::new();
    writeln!(out, "graph: {}", h.name(&key)).unwrap();
    writeln!(out, "scheme: {}", sfile.scheme).unwrap();
    writeln!(out, "phi = {}", phi.get(&key)?.window(lo, hi)).unwrap();
    writeln!(out, "phi_minus = {}", minus.window(lo, hi)).unwrap();
    writeln!(out, "phi_plus = {}", plus.window(lo, hi)).unwrap();
    match physical_limit(&plus) {
        Ok(c) => writeln!(out, "physical limit: {c}").unwrap(),
        Err(Error::NoPhysicalLimit(why)) => writeln!(out, "physical limit: none ({why})").unwrap(),
        Err(e) => return Err(e),
    }
    out.push_str("where\n");
    out.push_str(&h.legend());
    Ok(ctx.text(out))
}

fn examples(name: Option<&str>, output: Option<&Path>) -> Result<Output> {
    let Some(name) = name else {
        return Ok(Output::report(fixtures::NAMES.join("\n") + "\n"));
    };
    let text = fixtures::materialize(name).ok_or_else(|| {
        Error::Invalid(format!("unknown example '{name}' (one of {})", fixtures::NAMES.join(", ")))
    })? + "\n";
    Ok(match output {
        Some(p) => Output { text: format!("wrote {}\n", p.display()), status: 0, files: vec![(p.to_path_buf(), text)] },
        None => Output::report(text),
    })
}

fn replay(path: &Path, live: bool) -> Result<Output> {
    if !live {
        return Err(Error::Invalid("a replay cannot replay itself".into()));
    }
    let report = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let m = RunManifest::extract(&report)
        .ok_or_else(|| Error::Invalid(format!("{}: no run manifest found", path.display())))?;
    if m.version != env!("CARGO_PKG_VERSION") {
        return Err(Error::Precondition(format!("report was made by landau {}", m.version)));
    }
    for i in &m.inputs {
        let bytes = fs::read(&i.path).map_err(|e| Error::Precondition(format!("input {}: {e}", i.path)))?;
        if crate::manifest::digest(&bytes) != i.sha256 {
            return Err(Error::Precondition(format!("input {} changed since the report was made", i.path)));
        }
    }
    let cli = Cli::try_parse_from(std::iter::once("landau".to_string()).chain(m.command.iter().cloned()))
        .map_err(|e| Error::Invalid(format!("recorded command does not parse: {e}")))?;
    let again = run(&cli, &m.command, false)?;
    let target = fs::canonicalize(path).ok();
    let expected = again
        .files
        .iter()
        .find(|(p, _)| fs::canonicalize(p).ok() == target)
        .map_or(&again.text, |(_, t)| t);
    if *expected == report {
        return Ok(Output::report(format!("reproduced {} ({} bytes)\n", path.display(), report.len())));
    }
    let line = expected.lines().zip(report.lines()).position(|(a, b)| a != b).map_or_else(
        || expected.lines().count().min(report.lines().count()) + 1,
        |i| i + 1,
    );
    Err(Error::Precondition(format!("re-run differs from {} at line {line}", path.display())))
}
