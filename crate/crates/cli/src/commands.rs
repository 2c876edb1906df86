//! The four subcommands. Each builds its whole output in memory and writes
//! it once, so a rejected invocation never leaves a file behind.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sitdde_core::spectral::{boundary_spectrum, residual_tolerance};
use sitdde_core::{
    analyze, find_equilibria, integrate, linearize, scan, Component, Error, ModelParams, ParamId,
    Sampler, ScanConfig, StabilityVerdict, State,
};

use crate::config::{ConfigFile, Resolver};
use crate::format::{num, Delimiter, Table};
use crate::{CliError, Command, HistoryArgs, ModelArgs, ScanArgs, SimulateArgs, StabilityArgs};

const DEFAULT_DIGITS: usize = 9;
const DEFAULT_J_MAX: usize = 5;
const THREADS_ENV: &str = "SITDDE_THREADS";

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Equilibria(args) => equilibria(args),
        Command::Stability(args) => stability(args),
        Command::Scan(args) => scan_command(args),
    }
}

/// Output settings and the loaded config file.
struct Context {
    file: ConfigFile,
    out: Option<PathBuf>,
    delimiter: Delimiter,
    digits: usize,
}

impl Context {
    fn new(m: &ModelArgs) -> Result<Self, CliError> {
        let file = match &m.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let r = Resolver { file: &file };
        let out = r.optional("out", m.out.clone())?;
        let delimiter = r
            .or("format", m.format.clone(), "csv".into())?
            .parse()
            .map_err(CliError::Usage)?;
        let digits = r.or("precision", m.precision, DEFAULT_DIGITS)?;
        if !(1..=17).contains(&digits) {
            return Err(CliError::Usage(format!(
                "--precision must lie in 1..=17, got {digits}"
            )));
        }
        Ok(Context {
            file,
            out,
            delimiter,
            digits,
        })
    }

    fn resolver(&self) -> Resolver<'_> {
        Resolver { file: &self.file }
    }

    fn num(&self, v: f64) -> String {
        num(v, self.digits)
    }

    fn table(&self) -> Table<Vec<u8>> {
        Table::new(Vec::new(), self.delimiter)
    }

    fn emit(&self, bytes: &[u8]) -> Result<(), CliError> {
        write_to(self.out.as_deref(), bytes)
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, bytes).map_err(|e| {
            CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Builds the parameter set; `tau` falls back to `tau_default` when given.
fn params(ctx: &Context, m: &ModelArgs, tau_default: Option<f64>) -> Result<ModelParams, CliError> {
    let r = ctx.resolver();
    let tau = match (r.optional("tau", m.tau)?, tau_default) {
        (Some(t), _) => t,
        (None, Some(t)) => t,
        (None, None) => return Err(CliError::Usage("missing required value --tau".into())),
    };
    Ok(ModelParams::new(
        r.required("a", m.a)?,
        r.required("b", m.b)?,
        r.required("c", m.c)?,
        r.required("r", m.r)?,
        r.required("xi1", m.xi1)?,
        r.required("xi2", m.xi2)?,
        r.required("xi3", m.xi3)?,
        tau,
    )?)
}

fn history(ctx: &Context, h: &HistoryArgs) -> Result<State, CliError> {
    let r = ctx.resolver();
    let x = State::new(
        r.required("w0", h.w0)?,
        r.required("g0", h.g0)?,
        r.required("s0", h.s0)?,
    );
    if !x.to_array().iter().all(|v| v.is_finite() && *v >= 0.0) {
        return Err(CliError::Usage(format!(
            "initial history must be finite and non-negative, got w0={} g0={} s0={}",
            x.w, x.g, x.s
        )));
    }
    Ok(x)
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let ctx = Context::new(&args.model)?;
    let r = ctx.resolver();
    let p = params(&ctx, &args.model, None)?;
    let x0 = history(&ctx, &args.history)?;
    let t_end: f64 = r.required("t-end", args.t_end)?;
    let step = r.optional("step", args.history.step)?;
    let stride = r.or("stride", args.stride, 1usize)?;
    if stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CliError::Usage(format!(
            "--t-end must be positive, got {t_end}"
        )));
    }

    let run = integrate(&p, x0.into(), t_end, step)?;
    let traj = &run.trajectory;
    let mut table = ctx.table();
    table.row(&["t", "w", "g", "s"])?;
    let last = traj.len() - 1;
    for (i, (t, x)) in traj.times().iter().zip(traj.states()).enumerate() {
        if i % stride == 0 || i == last {
            table.row(&[ctx.num(*t), ctx.num(x[0]), ctx.num(x[1]), ctx.num(x[2])])?;
        }
    }
    ctx.emit(&table.into_inner())?;
    match run.blow_up {
        Some(time) => Err(Error::BlowUp { time }.into()),
        None => Ok(()),
    }
}

fn state_fields(ctx: &Context, x: State) -> String {
    format!("w={} g={} s={}", ctx.num(x.w), ctx.num(x.g), ctx.num(x.s))
}

fn parameter_line(ctx: &Context, p: &ModelParams) -> String {
    let fields: Vec<String> = ParamId::ALL
        .iter()
        .map(|id| format!("{}={}", id.name(), ctx.num(p.get(*id))))
        .collect();
    format!("parameters: {}\n", fields.join(" "))
}

fn equilibria(args: ModelArgs) -> Result<(), CliError> {
    let ctx = Context::new(&args)?;
    let p = params(&ctx, &args, Some(0.0))?;
    let summary = find_equilibria(&p)?;

    let mut out = parameter_line(&ctx, &p);
    for c in &summary.conditions {
        let status = if c.satisfied { "satisfied" } else { "violated" };
        match c.name.split_once(": ") {
            Some((label, expr)) => writeln!(out, "{label}: {status} ({expr})"),
            None => writeln!(out, "condition {}: {status}", c.name),
        }
        .expect("writing to a String");
    }
    let t = &summary.trivial;
    writeln!(
        out,
        "trivial: {} residual={}",
        state_fields(&ctx, t.location),
        ctx.num(t.residual)
    )
    .unwrap();
    match &summary.boundary {
        Some(e) => writeln!(
            out,
            "boundary: present {} residual={}",
            state_fields(&ctx, e.location),
            ctx.num(e.residual)
        ),
        None => writeln!(out, "boundary: absent (requires r > xi3)"),
    }
    .unwrap();
    writeln!(out, "positive equilibria: {}", summary.positive.len()).unwrap();
    for (i, e) in summary.positive.iter().enumerate() {
        let total = e.total.unwrap_or_else(|| e.location.total());
        writeln!(
            out,
            "positive {}: N={total:.3} w+g+s={} {} residual={} residual_ok={}",
            i + 1,
            ctx.num(total),
            state_fields(&ctx, e.location),
            ctx.num(e.residual),
            e.residual_ok()
        )
        .unwrap();
    }
    ctx.emit(out.as_bytes())
}

fn verdict_text(ctx: &Context, v: &StabilityVerdict) -> String {
    match v {
        StabilityVerdict::StableBelow { tau0, omega0 } => format!(
            "stable on [0, {t}), marginal at {t} (omega0={})",
            ctx.num(*omega0),
            t = ctx.num(*tau0)
        ),
        other => other.to_string(),
    }
}

fn complex_text(ctx: &Context, re: f64, im: f64) -> String {
    if im == 0.0 {
        ctx.num(re)
    } else if im > 0.0 {
        format!("{}+{}i", ctx.num(re), ctx.num(im))
    } else {
        format!("{}-{}i", ctx.num(re), ctx.num(-im))
    }
}

fn boundary_section(ctx: &Context, p: &ModelParams, out: &mut String) {
    let spectrum = match boundary_spectrum(p) {
        Ok(spectrum) => spectrum,
        Err(Error::NoBoundaryEquilibrium) => {
            out.push_str("boundary: absent (requires r > xi3)\n");
            return;
        }
        Err(e) => {
            writeln!(out, "boundary: spectrum unavailable: {e}").unwrap();
            return;
        }
    };
    writeln!(
        out,
        "boundary: s0={} class={} closed-form-class={} agree={} source-condition={} sink-condition={}",
        ctx.num(spectrum.s0),
        spectrum.class,
        spectrum.closed_form_class,
        spectrum.agrees(),
        spectrum.source_condition,
        spectrum.sink_condition
    )
    .unwrap();
    // pair each closed-form eigenvalue with the nearest unused numeric one
    let mut used = [false; 3];
    for (i, &l) in spectrum.closed_form.iter().enumerate() {
        let j = (0..3)
            .filter(|j| !used[*j])
            .min_by(|&a, &b| {
                let da = (spectrum.numeric[a].re - l).hypot(spectrum.numeric[a].im);
                let db = (spectrum.numeric[b].re - l).hypot(spectrum.numeric[b].im);
                da.total_cmp(&db)
            })
            .expect("three numeric eigenvalues");
        used[j] = true;
        let z = spectrum.numeric[j];
        writeln!(
            out,
            "boundary lambda{}: closed-form={} numeric={}",
            i + 1,
            ctx.num(l),
            complex_text(ctx, z.re, z.im)
        )
        .unwrap();
    }
}

fn stability(args: StabilityArgs) -> Result<(), CliError> {
    let ctx = Context::new(&args.model)?;
    let r = ctx.resolver();
    let tau = r.optional::<f64>("tau", args.model.tau)?;
    let p = params(&ctx, &args.model, Some(0.0))?;
    let j_max = r.or("j-max", args.j_max, DEFAULT_J_MAX)?;
    let show_boundary = r.flag("boundary", args.boundary)?;

    let mut out = parameter_line(&ctx, &p);
    if show_boundary {
        boundary_section(&ctx, &p, &mut out);
    }
    let positive = find_equilibria(&p)?.positive;
    if positive.is_empty() {
        ctx.emit(out.as_bytes())?;
        return Err(CliError::NoPositiveEquilibrium);
    }
    for (i, e) in positive.iter().enumerate() {
        let lin = linearize(e.location, &p)?;
        let report = analyze(&lin.deltas, j_max);
        let n = |v: f64| ctx.num(v);
        let list = |vals: &[f64], prefix: &str| -> String {
            vals.iter()
                .enumerate()
                .map(|(k, v)| format!("{prefix}{}={}", k + 1, n(*v)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(
            out,
            "equilibrium {}: {}",
            i + 1,
            state_fields(&ctx, e.location)
        )
        .unwrap();
        writeln!(out, "deltas: {}", list(&report.deltas.to_array(), "d")).unwrap();
        let rh = &report.routh_hurwitz;
        writeln!(
            out,
            "routh-hurwitz: c2={} c1={} c0={} c2*c1-c0={} {}",
            n(rh.c2),
            n(rh.c1),
            n(rh.c0),
            n(rh.product_margin()),
            if rh.stable { "stable" } else { "unstable" }
        )
        .unwrap();
        writeln!(out, "roots with Re>0 at tau=0: {}", report.rhp_at_zero).unwrap();
        writeln!(out, "gammas: {}", list(&report.gammas.to_array(), "g")).unwrap();
        let lemma = &report.lemma;
        writeln!(
            out,
            "lemma: {} (H3 first={} second={})",
            lemma.branch, lemma.h3_first, lemma.h3_second
        )
        .unwrap();
        let freqs: Vec<String> = report.frequencies_squared.iter().map(|m| n(*m)).collect();
        writeln!(
            out,
            "omega^2 roots: {}",
            if freqs.is_empty() {
                "none".to_string()
            } else {
                freqs.join(" ")
            }
        )
        .unwrap();
        for c in &report.crossings {
            let delays: Vec<String> = c.delays.delays.iter().map(|t| n(*t)).collect();
            writeln!(
                out,
                "crossing: omega={} direction={} residual={} residual<1e-8*(1+omega^3) tolerance={} delays={}",
                n(c.omega),
                c.transversality.direction,
                n(c.residual),
                n(residual_tolerance(c.omega)),
                delays.join(";")
            )
            .unwrap();
            if !c.delays.rejected.is_empty() {
                let rejected: Vec<String> = c.delays.rejected.iter().map(|t| n(*t)).collect();
                writeln!(
                    out,
                    "rejected delays: omega={} delays={}",
                    n(c.omega),
                    rejected.join(";")
                )
                .unwrap();
            }
        }
        for f in &report.failures {
            writeln!(out, "uncertified root: omega={} ({})", n(f.omega), f.error).unwrap();
        }
        match report.tau0() {
            Some((t0, w0)) => writeln!(out, "tau0: {} omega0={}", n(t0), n(w0)),
            None => writeln!(out, "tau0: none"),
        }
        .unwrap();
        if let Some(tau) = tau {
            writeln!(out, "regime at tau={}: {:?}", n(tau), report.regime_at(tau)).unwrap();
        }
        writeln!(out, "verdict: {}", verdict_text(&ctx, &report.verdict)).unwrap();
    }
    ctx.emit(out.as_bytes())
}

fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got `{s}`"
            ))
        }),
    }
}

fn summary_path(ctx: &Context, explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| {
        let ext = match ctx.delimiter {
            Delimiter::Csv => "summary.csv",
            Delimiter::Tsv => "summary.tsv",
        };
        ctx.out.as_ref().map(|o| o.with_extension(ext))
    })
}

fn scan_command(args: ScanArgs) -> Result<(), CliError> {
    let ctx = Context::new(&args.model)?;
    let r = ctx.resolver();
    let usage = |e: Error| CliError::Usage(e.to_string());
    let vary: ParamId = r
        .required::<String>("vary", args.vary.clone())?
        .parse()
        .map_err(usage)?;
    let lo: f64 = r.required("lo", args.lo)?;
    let hi: f64 = r.required("hi", args.hi)?;
    // the varied parameter is overwritten at every grid point
    let placeholder = (vary == ParamId::Tau).then_some(lo);
    let p = params(&ctx, &args.model, placeholder)?;
    let x0 = history(&ctx, &args.history)?;

    let mut cfg = ScanConfig::new(vary, lo, hi, r.or("n-points", args.n_points, 100)?, x0);
    cfg.t_transient = r.or("transient", args.transient, cfg.t_transient)?;
    cfg.t_sample = r.or("sample-time", args.sample_time, cfg.t_sample)?;
    cfg.observable = r
        .or::<String>("observable", args.observable.clone(), "s".into())?
        .parse::<Component>()
        .map_err(usage)?;
    cfg.sampler = match r
        .or::<String>("sampler", args.sampler.clone(), "extrema".into())?
        .as_str()
    {
        "extrema" => Sampler::Extrema,
        "strobe" => Sampler::Strobe {
            period: r.required("strobe-period", args.strobe_period)?,
        },
        other => {
            return Err(CliError::Usage(format!(
                "unknown sampler `{other}` (expected extrema or strobe)"
            )))
        }
    };
    cfg.step = r.optional("step", args.history.step)?;
    cfg.threads = threads_from_env()?;
    cfg.validate().map_err(usage)?;
    let summary_to = summary_path(&ctx, r.optional("summary", args.summary.clone())?);

    let result = scan(&p, &cfg)?;
    let name = vary.name();
    let obs = cfg.observable.name();

    let mut table = ctx.table();
    table.row(&["param", "value", "observable", "sample"])?;
    let mut summary = ctx.table();
    summary.row(&["param", "value", "kind", "samples", "min", "max", "error"])?;
    for pt in &result.points {
        let value = ctx.num(pt.value);
        match &pt.outcome {
            Ok(s) => {
                for v in &s.samples {
                    table.row(&[name, &value, obs, &ctx.num(*v)])?;
                }
                summary.row(&[
                    name.to_string(),
                    value.clone(),
                    s.kind.to_string(),
                    s.samples.len().to_string(),
                    ctx.num(s.min),
                    ctx.num(s.max),
                    String::new(),
                ])?;
            }
            Err(e) => {
                table.row(&[name, &value, "", "NaN"])?;
                summary.row(&[
                    name,
                    &value,
                    "failed",
                    "0",
                    "NaN",
                    "NaN",
                    &e.to_string().replace([',', '\t'], ";"),
                ])?;
            }
        }
    }
    let mut summary = summary.into_inner();
    writeln!(summary, "# failed points: {}", result.failures())?;
    if result.failures() > 0 {
        log::warn!(
            "{} of {} scan points failed",
            result.failures(),
            result.points.len()
        );
    }

    ctx.emit(&table.into_inner())?;
    match summary_to {
        Some(path) => write_to(Some(&path), &summary)?,
        None => io::stderr().write_all(&summary)?,
    }
    Ok(())
}
