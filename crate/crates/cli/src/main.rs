mod input;

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use groupoid_logic::io::{function_to_map, parse_function, parse_lattice, parse_object_set, to_canonical_json};
use groupoid_logic::lattice::{
    chinese_lantern_mo2, diamond_m3, dimension_check, distributive_audit, irreducible_elements, modular_audit,
    orthocomplement_audit, pentagon_n5, powerset_lattice,
};
use groupoid_logic::subsets::{relation_report_sampled, relation_report_with_limits};
use groupoid_logic::{
    bridge_decoherence, convolve_with, decoherence, decoherence_report, gns_report, grade2, interference,
    sorkin_audit, sorkin_third_order, Complex64, ConvolutionMode, DecoherenceReport, Error,
    Lattice, Limits, ObjectSet,
};
use input::Source;
use rand::SeedableRng;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "groupoid-logic", version, about = "Finite measured groupoids: conditioning, decoherence, GNS")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for audits (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convolution {
    Haar,
    Literal,
}

impl From<Convolution> for ConvolutionMode {
    fn from(c: Convolution) -> Self {
        match c {
            Convolution::Haar => ConvolutionMode::Haar,
            Convolution::Literal => ConvolutionMode::Literal,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the groupoid axioms, Haar invariance and phase laws.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// D over atoms, μ₂ and interference; optionally over a family and for given sets.
    Decohere {
        #[command(flatten)]
        source: Source,
        /// Extra family member (comma-separated labels); repeatable.
        #[arg(long = "set")]
        sets: Vec<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Worst third-order residual over all disjoint triples of subsets.
    SorkinAudit {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// GNS dimension, Gram spectrum and atomic null sets.
    GnsReport {
        #[command(flatten)]
        source: Source,
    },
    /// Reflexivity, symmetry and transitivity of conditioning.
    Relation {
        #[command(flatten)]
        source: Source,
        /// Random triples when Ω is too large to enumerate.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// ω(χ_{s⁻¹(b)}† ⋆ χ_{s⁻¹(a)}) next to D(b, a).
    Bridge {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "")]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long, value_enum, default_value_t = Convolution::Haar)]
        convolution: Convolution,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Convolve two function files.
    Convolve {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        f: String,
        #[arg(long)]
        h: String,
        #[arg(long, value_enum, default_value_t = Convolution::Haar)]
        convolution: Convolution,
    },
    /// Lattice audits on a fixture (`m3`, `n5`, `mo2`, `powerset:n`) or a lattice file.
    Lattice { lattice: String },
}

/// What a command produced, plus its exit code.
struct Report {
    json: Value,
    text: String,
    code: u8,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, code: 0 }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Resource { .. }) => 4,
        Some(Error::HaarInvariance { .. } | Error::Phase(_) | Error::ModularDomain(_) | Error::Domain(_)) => 3,
        _ => 2,
    }
}

fn error_json(err: &anyhow::Error) -> Value {
    let mut v = json!({ "error": format!("{err:#}"), "exit_code": exit_code(err) });
    match err.downcast_ref::<Error>() {
        Some(Error::Axioms(r)) => v["violations"] = json!(r.violations),
        Some(Error::Phase(r)) => v["violations"] = json!(r.violations),
        Some(Error::HaarInvariance { alpha, gamma, composite }) => {
            v["witness"] = json!({ "alpha": alpha, "gamma": gamma, "composite": composite })
        }
        _ => {}
    }
    v
}

fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

fn cnum(z: Complex64) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        format!("{}{}{}i", num(z.re), if z.im < 0.0 { "-" } else { "+" }, num(z.im.abs()))
    }
}

fn set_label(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(","))
}

fn table(out: &mut String, row_labels: &[String], col_labels: &[String], cell: impl Fn(usize, usize) -> String) {
    let cells: Vec<Vec<String>> =
        (0..row_labels.len()).map(|r| (0..col_labels.len()).map(|c| cell(r, c)).collect()).collect();
    let first = row_labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let width = cells
        .iter()
        .flatten()
        .chain(col_labels)
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(0);
    let _ = write!(out, "{:first$}", "");
    for l in col_labels {
        let _ = write!(out, "  {l:>width$}");
    }
    out.push('\n');
    for (r, l) in row_labels.iter().enumerate() {
        let _ = write!(out, "{l:first$}");
        for c in &cells[r] {
            let _ = write!(out, "  {c:>width$}");
        }
        out.push('\n');
    }
}

fn report_text(title: &str, r: &DecoherenceReport) -> String {
    let labels: Vec<String> = r.family.iter().map(|s| set_label(s)).collect();
    let mut out = format!("{title}: D(b, a), rows b, columns a{}\n", if r.phased { ", with phase" } else { "" });
    table(&mut out, &labels, &labels, |row, col| cnum(r.matrix[row][col]));
    out.push_str("μ₂\n");
    table(&mut out, &labels, &["μ₂".to_string()], |row, _| num(r.mu2[row]));
    out.push_str("I(a, b) on disjoint pairs\n");
    table(&mut out, &labels, &labels, |row, col| r.interference[row][col].map_or("-".into(), num));
    let _ = writeln!(out, "max |I³| over disjoint triples: {:e}", r.max_sorkin_residual);
    out
}

fn validate(source: &Source) -> Result<Report> {
    let g = source.groupoid_unchecked()?;
    let axioms = g.validate();
    let mut text = format!("groupoid: {} objects, {} morphisms\n", g.num_objects(), g.num_morphisms());
    let mut json = json!({
        "groupoid": { "objects": g.num_objects(), "morphisms": g.num_morphisms(), "violations": axioms.violations },
    });
    if !axioms.is_valid() {
        let _ = writeln!(text, "axioms: {} violations", axioms.violations.len());
        for v in &axioms.violations {
            let _ = writeln!(text, "  {v}");
        }
        json["valid"] = json!(false);
        return Ok(Report { json, text, code: 2 });
    }
    text.push_str("axioms: ok\n");

    let mg = match source.measured(g.clone()) {
        Ok(mg) => mg,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(text, "measure: {e:#}");
            json["measure"] = error_json(&e);
            json["valid"] = json!(false);
            return Ok(Report { json, text, code });
        }
    };
    let _ = writeln!(text, "measure: ok ({:?} Haar system)", mg.kind());
    json["measure"] = json!({ "haar": mg.kind(), "lambda": mg.lambda() });

    if source.phase.is_some() {
        match source.phase(&g) {
            Ok(_) => {
                text.push_str("phase: ok\n");
                json["phase"] = json!({ "violations": [] });
            }
            Err(e) => {
                let code = exit_code(&e);
                let _ = writeln!(text, "phase: {e:#}");
                if let Some(Error::Phase(r)) = e.downcast_ref::<Error>() {
                    for v in &r.violations {
                        let _ = writeln!(text, "  {}", serde_json::to_string(v)?);
                    }
                }
                json["phase"] = error_json(&e);
                json["valid"] = json!(false);
                return Ok(Report { json, text, code });
            }
        }
    }
    json["valid"] = json!(true);
    Ok(Report::ok(json, text))
}

fn decohere(source: &Source, sets: &[String], a: &Option<String>, b: &Option<String>, c: &Option<String>) -> Result<Report> {
    let g = source.groupoid()?;
    let phase = source.phase(&g)?;
    let mg = source.measured(g)?;
    let g = mg.groupoid();
    let atoms: Vec<ObjectSet> = g.objects().map(|j| ObjectSet::from_ids(g, [j])).collect();
    let atom_report = decoherence_report(&mg, &atoms, phase.as_ref())?;
    let mut text = report_text("atoms", &atom_report);
    let mut json = json!({ "atoms": atom_report });

    if !sets.is_empty() {
        let family = sets.iter().map(|s| parse_object_set(g, s)).collect::<groupoid_logic::Result<Vec<_>>>()?;
        let r = decoherence_report(&mg, &family, phase.as_ref())?;
        text.push('\n');
        text.push_str(&report_text("family", &r));
        json["family"] = serde_json::to_value(&r)?;
    }

    if a.is_some() || b.is_some() {
        let sa = parse_object_set(g, a.as_deref().unwrap_or(""))?;
        let sb = parse_object_set(g, b.as_deref().unwrap_or(""))?;
        let d = decoherence(&mg, &sb, &sa, phase.as_ref())?;
        let mut sets = json!({
            "a": sa.labels(g),
            "b": sb.labels(g),
            "d_ba": d,
            "mu2_a": grade2(&mg, &sa, phase.as_ref())?,
            "mu2_b": grade2(&mg, &sb, phase.as_ref())?,
        });
        let _ = writeln!(text, "\nD({}, {}) = {}", set_label(&sb.labels(g)), set_label(&sa.labels(g)), cnum(d));
        if sa.is_disjoint(&sb) {
            let i = interference(&mg, &sa, &sb, phase.as_ref())?;
            sets["interference"] = json!(i.value());
            let _ = writeln!(text, "I(a, b) = {}", num(i.value()));
            if let Some(c) = c {
                let sc = parse_object_set(g, c)?;
                let r = sorkin_third_order(&mg, &sa, &sb, &sc, phase.as_ref())?;
                sets["c"] = json!(sc.labels(g));
                sets["sorkin"] = json!(r);
                let _ = writeln!(text, "I³(a, b, c) = {r:e}");
            }
        }
        json["sets"] = sets;
    }
    Ok(Report::ok(json, text))
}

fn sorkin(source: &Source, tolerance: f64) -> Result<Report> {
    let g = source.groupoid()?;
    let phase = source.phase(&g)?;
    let mg = source.measured(g)?;
    let audit = sorkin_audit(&mg, phase.as_ref(), &Limits::from_env())?;
    let pass = audit.max_residual <= tolerance;
    let mut text = format!("max |I³| = {:e} over {} disjoint triples\n", audit.max_residual, audit.triples);
    if let Some(w) = &audit.worst {
        let _ = writeln!(text, "worst: a = {}, b = {}, c = {}", set_label(&w.a), set_label(&w.b), set_label(&w.c));
    }
    let _ = writeln!(text, "{} (tolerance {tolerance:e})", if pass { "ok" } else { "exceeds tolerance" });
    let mut json = serde_json::to_value(&audit)?;
    json["tolerance"] = json!(tolerance);
    json["pass"] = json!(pass);
    Ok(Report { json, text, code: if pass { 0 } else { 1 } })
}

fn gns(source: &Source) -> Result<Report> {
    let g = source.groupoid()?;
    let mg = source.measured(g)?;
    let r = gns_report(&mg)?;
    let mut text = format!(
        "GNS dimension: {} (algebra dimension {})\nGram eigenvalues: min {}, max {}\n",
        r.dimension,
        r.algebra_dimension,
        num(r.min_eigenvalue),
        num(r.max_eigenvalue)
    );
    if r.restricted_to_support {
        text.push_str("computed on the sub-groupoid where λ > 0\n");
    }
    let null: Vec<String> = r.null_atoms.iter().filter(|c| c.in_ideal).map(|c| set_label(&c.set)).collect();
    let _ = writeln!(text, "atomic null sets: {}", if null.is_empty() { "none".into() } else { null.join(" ") });
    let inconsistent = r.null_atoms.iter().filter(|c| !c.consistent).count();
    if inconsistent > 0 {
        let _ = writeln!(text, "warning: {inconsistent} atoms where μ₂ = 0 and ideal membership disagree");
    }
    Ok(Report { json: serde_json::to_value(&r)?, text, code: if inconsistent > 0 { 1 } else { 0 } })
}

fn relation(source: &Source, samples: usize, seed: u64) -> Result<Report> {
    let g = source.groupoid()?;
    let limits = Limits::from_env();
    let r = match relation_report_with_limits(&g, &limits) {
        Err(Error::Resource { .. }) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            relation_report_sampled(&g, samples, &mut rng)
        }
        other => other?,
    };
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut text = format!(
        "{} {} subsets\nreflexive on non-empty sets: {}\nsymmetric: {}\ntransitive: {}\n",
        if r.sampled { "sampled" } else { "enumerated" },
        r.subsets_examined,
        yes(r.reflexive_on_nonempty),
        yes(r.symmetric),
        yes(r.transitive)
    );
    if let Some(w) = &r.counterexamples.transitive {
        let _ = writeln!(
            text,
            "witness: {} ~ {} and {} ~ {}, but not {} ~ {}",
            set_label(&w.a),
            set_label(&w.b),
            set_label(&w.b),
            set_label(&w.c),
            set_label(&w.a),
            set_label(&w.c)
        );
    }
    let code = if r.reflexive_on_nonempty && r.symmetric { 0 } else { 1 };
    Ok(Report { json: serde_json::to_value(&r)?, text, code })
}

fn bridge(source: &Source, a: &str, b: &str, mode: ConvolutionMode, tolerance: f64) -> Result<Report> {
    let g = source.groupoid()?;
    let mg = source.measured(g)?;
    let g = mg.groupoid();
    let (sa, sb) = (parse_object_set(g, a)?, parse_object_set(g, b)?);
    let br = bridge_decoherence(&mg, &sb, &sa, mode)?;
    let d = decoherence(&mg, &sb, &sa, None)?;
    let err = (br.value - d).norm();
    let fail = br.certified && err > tolerance;
    let mut text = format!(
        "ω(χ† ⋆ χ) = {}\nD(b, a)   = {}\n|difference| = {err:e}\n",
        cnum(br.value),
        cnum(d)
    );
    if !br.certified {
        text.push_str("not certified: equality is only claimed for the normalized Haar system with Haar convolution\n");
    }
    if br.restricted_to_support {
        text.push_str("computed on the sub-groupoid where λ > 0\n");
    }
    let json = json!({
        "a": sa.labels(g),
        "b": sb.labels(g),
        "omega": br.value,
        "decoherence": d,
        "difference": err,
        "certified": br.certified,
        "restricted_to_support": br.restricted_to_support,
        "tolerance": tolerance,
    });
    Ok(Report { json, text, code: if fail { 1 } else { 0 } })
}

fn convolve_files(source: &Source, f: &str, h: &str, mode: ConvolutionMode) -> Result<Report> {
    let g = source.groupoid()?;
    let mg = source.measured(g)?;
    let g = mg.groupoid();
    let read = |p: &str| fs::read_to_string(p).with_context(|| format!("cannot read `{p}`"));
    let f = parse_function(g, &read(f)?)?;
    let h = parse_function(g, &read(h)?)?;
    let out = convolve_with(&mg, &f, &h, mode)?;
    let map = function_to_map(g, &out);
    let mut text = String::new();
    for (label, (re, im)) in &map {
        let _ = writeln!(text, "{label}  {}", cnum(Complex64::new(*re, *im)));
    }
    if map.is_empty() {
        text.push_str("zero function\n");
    }
    Ok(Report::ok(serde_json::to_value(&map)?, text))
}

fn lattice(spec: &str) -> Result<Report> {
    let l = match spec {
        "m3" => diamond_m3(),
        "n5" => pentagon_n5(),
        "mo2" => chinese_lantern_mo2(),
        _ => match spec.strip_prefix("powerset:") {
            Some(n) => powerset_lattice(n.parse().map_err(|_| Error::Parse(format!("bad size `{n}`")))?)?.to_table(),
            None => parse_lattice(&fs::read_to_string(spec).with_context(|| format!("cannot read `{spec}`"))?)?,
        },
    };
    let label3 = |(a, b, c): (usize, usize, usize)| vec![l.label(a), l.label(b), l.label(c)];
    let distributive = distributive_audit(&l);
    let modular = modular_audit(&l);
    let ortho = orthocomplement_audit(&l);
    let irreducible: Vec<String> = irreducible_elements(&l).into_iter().map(|x| l.label(x)).collect();
    let mut json = json!({
        "size": l.size(),
        "distributive_violations": distributive.len(),
        "first_distributive_violation": distributive.first().map(|&t| label3(t)),
        "modular_violations": modular.len(),
        "first_modular_violation": modular.first().map(|&t| label3(t)),
        "orthocomplement_violations": ortho,
        "irreducible": irreducible,
    });
    let mut text = format!(
        "{} elements\ndistributive: {}\nmodular: {}\northocomplemented: {}\nirreducible elements: {}\n",
        l.size(),
        distributive.first().map_or("yes".into(), |&t| format!("no, e.g. {:?}", label3(t))),
        modular.first().map_or("yes".into(), |&t| format!("no, e.g. {:?}", label3(t))),
        if ortho.is_empty() { "yes".to_string() } else { format!("no ({} violations)", ortho.len()) },
        json["irreducible"].as_array().map(|v| v.len()).unwrap_or(0)
    );
    if let Some(n) = spec.strip_prefix("powerset:").and_then(|n| n.parse::<usize>().ok()) {
        let d: Vec<f64> = (0..l.size()).map(|a| (a as u64).count_ones() as f64 / n.max(1) as f64).collect();
        let r = dimension_check(&l, &d)?;
        let _ = writeln!(text, "normalized cardinality is a dimension function: {}", if r.is_valid() { "yes" } else { "no" });
        json["cardinality_dimension_valid"] = json!(r.is_valid());
    }
    Ok(Report::ok(json, text))
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Validate { source } => validate(source),
        Command::Decohere { source, sets, a, b, c } => decohere(source, sets, a, b, c),
        Command::SorkinAudit { source, tolerance } => sorkin(source, *tolerance),
        Command::GnsReport { source } => gns(source),
        Command::Relation { source, samples, seed } => relation(source, *samples, *seed),
        Command::Bridge { source, a, b, convolution, tolerance } => bridge(source, a, b, (*convolution).into(), *tolerance),
        Command::Convolve { source, f, h, convolution } => convolve_files(source, f, h, (*convolution).into()),
        Command::Lattice { lattice: spec } => lattice(spec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let (json, text, code) = match pool.install(|| run(&cli)) {
        Ok(r) => (r.json, r.text, r.code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = exit_code(&e);
            (error_json(&e), String::new(), code)
        }
    };
    match cli.format {
        Format::Json => match to_canonical_json(&json) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        Format::Text => print!("{text}"),
    }
    ExitCode::from(code)
}
