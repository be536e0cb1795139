//! Command-line front end: scenario files in, canonical text or JSON out.
//!
//! Exit codes: 0 all requested checks pass, 1 a checked identity or a
//! geometric hypothesis fails, 2 malformed input or an unsupported
//! request, 3 internal inconsistency.

pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::charclass::{class_relation, weyl_curvature};
use crate::error::Error;
use crate::fedosov::FedosovSolution;
use crate::hermitian::{deformed_h, deformed_metric_suite, fiber_metric_suite, reality_suite};
use crate::report::Report;
use crate::taylor_star::{act_left, act_right, star, star_prime, taylor, taylor_e_residual, taylor_prime_residual, taylor_residual};
use crate::testkit::suite::{class_suite, moyal_suite, verify_geometry_identities, Trials};
use crate::testkit::{run_property_suite, scenarios, RandomSpec, Sampler, SuiteOptions};
use crate::weyl::serial::{to_canonical_text, to_json};
use crate::weyl::{Fiber, FormalSeries};
use scenario::{parse_scenario, Arg, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "fedosov", version, about = "Exact Fedosov star products on a Darboux chart")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// λ-order K of the computation (overrides the scenario's [order]).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Also run the residual and flatness checks behind the result.
    #[arg(long, global = true)]
    pub verify: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed of the randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the geometry and check the covariant-derivative identities.
    CheckGeometry { scenario: PathBuf },
    /// Solve for r, r′ and r^E.
    SolveR { scenario: PathBuf },
    /// f ⋆ g for two function expressions.
    Star { scenario: PathBuf, f: Option<String>, g: Option<String> },
    /// A ⋆′ B for two matrices given as JSON arrays of expressions.
    StarEnd { scenario: PathBuf, a: Option<String>, b: Option<String> },
    /// A •′ s • f.
    Act {
        scenario: PathBuf,
        a: Option<String>,
        s: Option<String>,
        f: Option<String>,
    },
    /// The Fedosov–Taylor series τ(f).
    Taylor { scenario: PathBuf, f: Option<String> },
    /// The deformed metric h(s, s′).
    Metric { scenario: PathBuf, s: Option<String>, t: Option<String> },
    /// Reality and metric identities of a Hermitian scenario.
    HermitianCheck { scenario: PathBuf },
    /// Weyl curvatures W, W′ of a line bundle and the factor in W′ − W = c·λ·R^L.
    CharClass { scenario: PathBuf },
    /// Every [query ...] section of the scenario, in order.
    Run { scenario: PathBuf },
    /// The property suites on the bundled scenarios.
    Selftest {
        /// Acceptance-size trial counts instead of the quick ones.
        #[arg(long)]
        full: bool,
    },
}

/// Result of one command: rendered output and exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Geometry(_) => 1,
        Error::Inconsistency(_) | Error::NegativeLambda(_) => 3,
        _ => 2,
    }
}

#[derive(Clone)]
struct Ctx {
    format: Format,
    verify: bool,
    seed: u64,
    order_override: Option<usize>,
    /// Under `run`: the query section whose arguments apply.
    query: Option<usize>,
}

/// Output of a command before rendering.
struct Section {
    title: String,
    text: String,
    json: Value,
}

struct Output {
    header: Vec<String>,
    sections: Vec<Section>,
    report: Option<Report>,
}

impl Output {
    fn new(header: Vec<String>) -> Self {
        Self {
            header,
            sections: vec![],
            report: None,
        }
    }

    fn push(&mut self, title: &str, text: String, json: Value) {
        self.sections.push(Section {
            title: title.to_string(),
            text,
            json,
        });
    }

    fn push_series<F: Fiber>(&mut self, title: &str, s: &FormalSeries<F>) {
        self.push(title, s.to_string(), s.to_json());
    }

    fn add_report(&mut self, rep: Report) {
        match &mut self.report {
            Some(r) => r.extend(rep),
            None => self.report = Some(rep),
        }
    }

    fn passed(&self) -> bool {
        self.report.as_ref().is_none_or(Report::all_passed)
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut s = String::new();
                for h in &self.header {
                    s.push_str(&format!("# {h}\n"));
                }
                for sec in &self.sections {
                    s.push_str(&format!("## {}\n{}", sec.title, sec.text));
                }
                if let Some(r) = &self.report {
                    s.push_str(&r.to_string());
                }
                s
            }
            Format::Json => {
                let sections: Vec<Value> = self.sections.iter().map(|s| json!({"title": s.title, "value": s.json})).collect();
                let v = json!({
                    "header": self.header,
                    "results": sections,
                    "report": self.report.as_ref().map(Report::to_json),
                    "passed": self.passed(),
                });
                let mut s = serde_json::to_string_pretty(&v).expect("json output");
                s.push('\n');
                s
            }
        }
    }
}

/// Parse arguments and run; never exits the process.
pub fn run_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx {
        format: cli.format,
        verify: cli.verify,
        seed: cli.seed,
        order_override: cli.order,
        query: None,
    };
    match execute(&ctx, &cli.command) {
        Ok(out) => Outcome {
            stdout: out.render(ctx.format),
            stderr: String::new(),
            code: if out.passed() { 0 } else { 1 },
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: exit_code(&e),
        },
    }
}

fn load(path: &PathBuf) -> crate::Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Unsupported(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

struct Loaded {
    scenario: Scenario,
    order: usize,
    query: Option<usize>,
}

impl Loaded {
    fn new(ctx: &Ctx, path: &PathBuf) -> crate::Result<Self> {
        let scenario = load(path)?;
        let order = ctx.order_override.unwrap_or(scenario.order);
        Ok(Self {
            scenario,
            order,
            query: ctx.query,
        })
    }

    fn solve(&self) -> crate::Result<FedosovSolution> {
        let geo = self.scenario.geometry.clone().build()?;
        FedosovSolution::for_lambda_order(geo, self.order)
    }

    fn header(&self, sol: &FedosovSolution) -> Vec<String> {
        vec![
            format!("geometry {}", sol.geometry().input().digest()),
            format!("n = {}, rank = {}, K = {}, N = {}", sol.n(), sol.rank(), self.order, sol.trunc().get()),
        ]
    }

    /// The named argument: from the command line if given, else from the
    /// `[query command]` section being run, or the first one.
    fn arg(&self, command: &str, name: &str, cli: Option<&String>, json_value: bool) -> crate::Result<Arg> {
        if let Some(text) = cli {
            return Arg::inline(name, text, json_value);
        }
        self.scenario
            .queries
            .iter()
            .enumerate()
            .filter(|(i, q)| q.command == command && self.query.map_or(true, |k| k == *i))
            .find_map(|(_, q)| q.args.iter().find(|a| a.name == name))
            .cloned()
            .ok_or_else(|| Error::Unsupported(format!("missing argument '{name}' for {command}")))
    }
}

fn seeded(ctx: &Ctx, count: usize) -> RandomSpec {
    RandomSpec {
        seed: ctx.seed,
        count,
        ..RandomSpec::default()
    }
}

fn suite_options(ctx: &Ctx, order: usize, trials: Trials) -> SuiteOptions {
    SuiteOptions {
        spec: seeded(ctx, trials.structural),
        order,
        element_trunc: 5,
        trials,
    }
}

fn execute(ctx: &Ctx, cmd: &Command) -> crate::Result<Output> {
    match cmd {
        Command::CheckGeometry { scenario } => {
            let l = Loaded::new(ctx, scenario)?;
            let geo = l.scenario.geometry.clone().build()?;
            let mut out = Output::new(vec![format!("geometry {}", l.scenario.geometry.digest())]);
            out.push("validation", "ok\n".into(), json!("ok"));
            let opts = suite_options(ctx, l.order, Trials::acceptance());
            out.add_report(verify_geometry_identities(&geo, &opts));
            Ok(out)
        }
        Command::SolveR { scenario } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let mut out = Output::new(l.header(&sol));
            for (title, text, js) in [
                ("r", to_canonical_text(&sol.r()), to_json(&sol.r())),
                ("r'", to_canonical_text(&sol.r_prime()), to_json(&sol.r_prime())),
                ("rE", to_canonical_text(&sol.r_e()), to_json(&sol.r_e())),
            ] {
                out.push(title, text, js);
            }
            if ctx.verify {
                out.add_report(sol.verify());
            }
            Ok(out)
        }
        Command::Star { scenario, f, g } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let n = sol.n();
            let f = l.arg("star", "f", f.as_ref(), false)?.function(n, l.order)?;
            let g = l.arg("star", "g", g.as_ref(), false)?.function(n, l.order)?;
            let mut out = Output::new(l.header(&sol));
            out.push_series("f * g", &star(&sol, &f, &g)?);
            if ctx.verify {
                let mut rep = Report::new("verification");
                for (name, x) in [("f", &f), ("g", &g)] {
                    let r = taylor_residual(&sol, x)?;
                    rep.record(&format!("taylor-flat-{name}"), "𝒟τ = 0", 1, (!r.is_zero()).then(|| to_canonical_text(&r)));
                }
                out.add_report(rep);
            }
            Ok(out)
        }
        Command::StarEnd { scenario, a, b } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let (n, rank) = (sol.n(), sol.rank());
            let a = l.arg("star-end", "A", a.as_ref(), true)?.endo(n, rank, l.order)?;
            let b = l.arg("star-end", "B", b.as_ref(), true)?.endo(n, rank, l.order)?;
            let mut out = Output::new(l.header(&sol));
            out.push_series("A *' B", &star_prime(&sol, &a, &b)?);
            if ctx.verify {
                let mut rep = Report::new("verification");
                for (name, x) in [("A", &a), ("B", &b)] {
                    let r = taylor_prime_residual(&sol, x)?;
                    rep.record(&format!("taylor-prime-flat-{name}"), "𝒟′τ′ = 0", 1, (!r.is_zero()).then(|| to_canonical_text(&r)));
                }
                out.add_report(rep);
            }
            Ok(out)
        }
        Command::Act { scenario, a, s, f } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let (n, rank) = (sol.n(), sol.rank());
            let a = l.arg("act", "A", a.as_ref(), true)?.endo(n, rank, l.order)?;
            let s = l.arg("act", "s", s.as_ref(), true)?.section(n, rank, l.order)?;
            let f = l.arg("act", "f", f.as_ref(), false)?.function(n, l.order)?;
            let mut out = Output::new(l.header(&sol));
            let left = act_left(&sol, &a, &s)?;
            let both = act_right(&sol, &left, &f)?;
            out.push_series("A .' s", &left);
            out.push_series("s . f", &act_right(&sol, &s, &f)?);
            out.push_series("A .' s . f", &both);
            if ctx.verify {
                let mut rep = Report::new("verification");
                let other = act_left(&sol, &a, &act_right(&sol, &s, &f)?)?;
                rep.record("actions-commute", "(A•′s)•f = A•′(s•f)", 1, (other != both).then(|| other.to_string()));
                let r = taylor_e_residual(&sol, &s)?;
                rep.record("taylor-E-flat", "𝒟^Eτ^E(s) = 0", 1, (!r.is_zero()).then(|| to_canonical_text(&r)));
                out.add_report(rep);
            }
            Ok(out)
        }
        Command::Taylor { scenario, f } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let f = l.arg("taylor", "f", f.as_ref(), false)?.function(sol.n(), l.order)?;
            let t = taylor(&sol, &f)?;
            let mut out = Output::new(l.header(&sol));
            out.push("tau(f)", to_canonical_text(&t), to_json(&t));
            if ctx.verify {
                let mut rep = Report::new("verification");
                let r = taylor_residual(&sol, &f)?;
                rep.record("taylor-flat", "𝒟τ(f) = 0", 1, (!r.is_zero()).then(|| to_canonical_text(&r)));
                let back = t.symbol()?;
                rep.record("symbol-of-taylor", "σ(τ(f)) = f", 1, (back != f).then(|| back.to_string()));
                out.add_report(rep);
            }
            Ok(out)
        }
        Command::Metric { scenario, s, t } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let (n, rank) = (sol.n(), sol.rank());
            let s = l.arg("metric", "s", s.as_ref(), true)?.section(n, rank, l.order)?;
            let t = l.arg("metric", "s'", t.as_ref(), true)?.section(n, rank, l.order)?;
            let mut out = Output::new(l.header(&sol));
            let h = deformed_h(&sol, &s, &t)?;
            out.push_series("h(s, s')", &h);
            if ctx.verify {
                let mut rep = Report::new("verification");
                let back = deformed_h(&sol, &t, &s)?.conj();
                rep.record("h-hermitian", "h(s,s′) = conj h(s′,s)", 1, (back != h).then(|| back.to_string()));
                out.add_report(rep);
            }
            Ok(out)
        }
        Command::HermitianCheck { scenario } => {
            let l = Loaded::new(ctx, scenario)?;
            let sol = l.solve()?;
            let mut out = Output::new(l.header(&sol));
            let spec = seeded(ctx, Trials::acceptance().hermitian);
            let mut sampler = Sampler::new(&spec, sol.n(), sol.rank());
            out.add_report(reality_suite(&sol, &mut sampler)?);
            out.add_report(fiber_metric_suite(&sol, &mut sampler)?);
            out.add_report(deformed_metric_suite(&sol, &mut sampler)?);
            Ok(out)
        }
        Command::CharClass { scenario } => {
            let l = Loaded::new(ctx, scenario)?;
            if l.scenario.geometry.rank != 1 {
                return Err(Error::Unsupported(format!(
                    "char-class needs a line bundle: rank must be 1, got {}",
                    l.scenario.geometry.rank
                )));
            }
            let sol = l.solve()?;
            let mut out = Output::new(l.header(&sol));
            let rel = class_relation(&sol)?;
            out.push("W", rel.curvature.form.to_string(), json!(rel.curvature.form.to_string()));
            out.push("W'", rel.curvature_prime.form.to_string(), json!(rel.curvature_prime.form.to_string()));
            let factor = rel.factor.as_ref().map(|c| c.to_string());
            let text = match &factor {
                Some(c) => format!("{c}\n"),
                None => "none\n".to_string(),
            };
            out.push("factor c in W' - W = c*lam*R^L", text, json!(factor));
            let mut rep = Report::new("class checks");
            let w = weyl_curvature(&sol, false)?;
            rep.record("central-closed", "W and W′ central and closed", 1, {
                let ok = w.central && w.closed && rel.curvature_prime.central && rel.curvature_prime.closed;
                (!ok).then(|| "curvature not central or not closed".to_string())
            });
            rep.record("weyl-curvature-value", "W = ω + Ω", 1, (!rel.matches_omega).then(|| w.form.to_string()));
            out.add_report(rep);
            Ok(out)
        }
        Command::Run { scenario } => {
            let l = Loaded::new(ctx, scenario)?;
            if l.scenario.queries.is_empty() {
                return Err(Error::Unsupported("the scenario has no [query ...] sections".into()));
            }
            let mut combined = Output::new(vec![]);
            for (i, q) in l.scenario.queries.iter().enumerate() {
                let sub = query_command(&q.command, scenario)
                    .ok_or_else(|| Error::Unsupported(format!("unknown command '{}' (line {})", q.command, q.line)))?;
                let out = execute(&Ctx { query: Some(i), ..ctx.clone() }, &sub)?;
                if combined.header.is_empty() {
                    combined.header = out.header.clone();
                }
                for sec in out.sections {
                    combined.push(&format!("{} / {}", q.command, sec.title), sec.text, sec.json);
                }
                if let Some(r) = out.report {
                    combined.add_report(r);
                }
            }
            Ok(combined)
        }
        Command::Selftest { full } => Ok(selftest(ctx, *full)),
    }
}

fn query_command(name: &str, path: &PathBuf) -> Option<Command> {
    let scenario = path.clone();
    Some(match name {
        "check-geometry" => Command::CheckGeometry { scenario },
        "solve-r" => Command::SolveR { scenario },
        "star" => Command::Star { scenario, f: None, g: None },
        "star-end" => Command::StarEnd { scenario, a: None, b: None },
        "act" => Command::Act {
            scenario,
            a: None,
            s: None,
            f: None,
        },
        "taylor" => Command::Taylor { scenario, f: None },
        "metric" => Command::Metric { scenario, s: None, t: None },
        "hermitian-check" => Command::HermitianCheck { scenario },
        "char-class" => Command::CharClass { scenario },
        _ => return None,
    })
}

fn selftest(ctx: &Ctx, full: bool) -> Output {
    let order = ctx.order_override.unwrap_or(if full { 4 } else { 2 });
    let trials = if full {
        Trials::acceptance()
    } else {
        Trials {
            structural: 20,
            geometry: 10,
            flatness: 10,
            star: 5,
            moyal: 10,
            bimodule: 5,
            hermitian: 3,
        }
    };
    let opts = suite_options(ctx, order, trials);
    let mut out = Output::new(vec![format!("selftest seed = {}, K = {order}", ctx.seed)]);
    for (name, g) in scenarios::all() {
        let mut rep = run_property_suite(&g, &opts);
        for r in &mut rep.records {
            r.name = format!("{name}/{}", r.name);
        }
        out.add_report(rep);
    }
    out.add_report(moyal_suite(1, &opts));
    out.add_report(class_suite(order.min(2)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("fedosov-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run_cli(args: &[&str]) -> Outcome {
        run_with_args(std::iter::once("fedosov").chain(args.iter().copied()))
    }

    #[test]
    fn flat_star_of_coordinates() {
        let p = write("flat.txt", "[geometry]\nn = 1\n[order]\nK = 1\n");
        let out = run_cli(&["star", p.to_str().unwrap(), "x1", "x2"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("## f * g\nlambda^0: x1*x2\nlambda^1: 1/2*i\n"), "{}", out.stdout);
    }

    #[test]
    fn exit_codes() {
        let bad = write("bad.txt", "[geometry]\nn = 1\ngamma[1][1][1] = \"x1 +\"\n");
        assert_eq!(run_cli(&["solve-r", bad.to_str().unwrap()]).code, 2);
        let asym = write("asym.txt", "[geometry]\nn = 1\ngamma[1][1][2] = \"x1\"\ngamma[2][1][1] = \"x2\"\n");
        assert_eq!(run_cli(&["check-geometry", asym.to_str().unwrap()]).code, 1);
        let rank2 = write("rank2.txt", "[geometry]\nn = 1\nrank = 2\n");
        let out = run_cli(&["char-class", rank2.to_str().unwrap()]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("rank must be 1"));
        assert_eq!(run_cli(&["frobnicate"]).code, 2);
        let flat = write("flat2.txt", "[geometry]\nn = 1\n[order]\nK = 1\n");
        assert_eq!(run_cli(&["taylor", flat.to_str().unwrap(), "lam^2"]).code, 2);
    }

    #[test]
    fn json_output_is_valid() {
        let p = write("json.txt", "[geometry]\nn = 1\n[order]\nK = 1\n[query taylor]\nf = \"x1*x2\"\n");
        let out = run_cli(&["run", p.to_str().unwrap(), "--format", "json", "--verify"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["passed"], true);
    }
}
