//! Command-line front end: every library operation as a subcommand with
//! reproducible JSON reports.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use config::RunConfig;
use formfact::arith::{self, Effort};
use formfact::bhargava::{self, BhargavaSet};
use formfact::formclass::{self, PrimeTag, PsetStatus};
use formfact::genfact::{self, FactorizationVector, FieldSplitting, SplittingTable};
use formfact::hunt::{self, CertifyOptions, GapClass, RhsKind, SearchReport};
use formfact::parse::{self, RhsSpec, SetDescriptor};
use formfact::quadrep::{self, NotRepReason, QuadForm, RepVerdict};

#[derive(Parser)]
#[command(
    name = "formfact",
    version,
    about = "Binary forms against factorial-like integers: profiles, criteria, searches, certificates"
)]
struct Cli {
    /// Config file with `key = value` lines (flags override it).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = automatic).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the meta block (timings) for byte-reproducible output.
    #[arg(long, global = true)]
    no_meta: bool,
    /// Largest decimal-digit count any materialized integer may have.
    #[arg(long, global = true)]
    digit_bound: Option<usize>,
    /// Largest sieve endpoint.
    #[arg(long, global = true)]
    sieve_bound: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Binary forms: discriminants, cycle types, prime-set membership, density.
    Form {
        #[command(subcommand)]
        cmd: FormCmd,
    },
    /// Quadratic representability tests.
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Highly divisible sequence profiles.
    Fact {
        #[command(subcommand)]
        cmd: FactCmd,
    },
    /// Ideal-norm products over quadratic or user-profiled fields.
    Pik {
        #[command(subcommand)]
        cmd: PikCmd,
    },
    /// Generalized factorials over integer subsets.
    Bharg {
        #[command(subcommand)]
        cmd: BhargCmd,
    },
    /// Searches, certificates, and empirical checks.
    Hunt {
        #[command(subcommand)]
        cmd: HuntCmd,
    },
}

#[derive(Subcommand)]
enum FormCmd {
    /// Discriminants, content, irreducibility, factorization.
    Info {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// Cycle type at one prime or at every good prime up to a bound.
    Cycletype {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(long, conflicts_with = "upto")]
        prime: Option<u64>,
        #[arg(long)]
        upto: Option<u64>,
    },
    /// Prime-set membership for all primes up to a bound.
    Pset {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        upto: u64,
    },
    /// Fraction of good primes where the form has a root mod p.
    Density {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        upto: u64,
        /// Emit convergence checkpoints as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Criterion and complete brute-force search, cross-checked.
    Test {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Sum-of-three-squares test.
    ThreeSquares { n: String },
}

#[derive(Subcommand)]
enum FactCmd {
    /// Exponent profile of factorial | lcm | primorial | multinomial:a.
    Profile {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        l: u64,
    },
}

#[derive(Subcommand)]
enum PikCmd {
    /// Exponent profile of the product of ideal norms up to l.
    Profile {
        #[arg(long, conflicts_with = "table", allow_negative_numbers = true)]
        delta: Option<i64>,
        /// Splitting-table file for a non-quadratic field.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        l: u64,
    },
    /// Number of ideals of norm n.
    Count {
        #[arg(long, conflicts_with = "table", allow_negative_numbers = true)]
        delta: Option<i64>,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum BhargCmd {
    /// Exponent profile of the generalized factorial l!_S.
    Profile {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        l: u64,
        /// Prime bound for enumerated descriptors.
        #[arg(long)]
        primes: Option<u64>,
    },
    /// Greedy p-ordering with valuations and stability flags.
    Order {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        len: u64,
    },
    /// Radical-vs-value growth table.
    Growth {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        range: String,
        #[arg(long)]
        primes: Option<u64>,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    form: String,
    #[arg(long)]
    rhs: String,
    /// Inclusive range lo:hi.
    #[arg(long)]
    range: String,
    /// Apply the restricted-norm-form rule (eligible exponents must be >= 2).
    #[arg(long)]
    norm_form: bool,
    /// Prime bound for generalized-factorial right-hand sides.
    #[arg(long)]
    primes: Option<u64>,
}

#[derive(Subcommand)]
enum HuntCmd {
    /// All (x, l) with P(x) = l!.
    Brocard {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        lmax: u64,
    },
    /// Per-l certificates for form = right-hand side.
    Certify(CertifyArgs),
    /// Verify the (a!/4 +- 1) family of x^2 - y^2 = a!.
    Family {
        #[arg(long)]
        arange: String,
    },
    /// Empirical successor gaps among eligible primes.
    Gaps {
        #[arg(long, conflicts_with = "form")]
        residue: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
        #[arg(long)]
        range: String,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        csv: bool,
    },
    /// Parity conditions of a principal form against a profile source.
    Parity {
        #[arg(long, allow_negative_numbers = true)]
        delta: i64,
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        range: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

enum Output {
    Json(Value),
    Csv(String),
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(d) = cli.digit_bound {
        cfg.digit_bound = d;
    }
    if let Some(s) = cli.sieve_bound {
        cfg.sieve_bound = s;
    }
    if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build_global()
            .ok();
    }

    let (output, code) = dispatch(&cli, &cfg)?;
    let text = match output {
        Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(&v)?),
        Output::Csv(s) => s,
    };
    match cfg.resolve_output(cli.out.as_deref()) {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(&path, text)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("report written to {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(code)
}

fn fv_pairs(v: &FactorizationVector) -> Value {
    Value::Array(
        v.iter()
            .map(|(p, e)| Value::Array(vec![p.into(), e.into()]))
            .collect(),
    )
}

fn strip_meta(report: &mut SearchReport, no_meta: bool) {
    if no_meta {
        report.meta = None;
    }
}

fn exit_for(report: &SearchReport) -> ExitCode {
    if report.unknown_fraction() > 0.5 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<(Output, ExitCode)> {
    let limits = cfg.limits();
    let ok = ExitCode::SUCCESS;
    match &cli.cmd {
        Cmd::Form { cmd } => match cmd {
            FormCmd::Info { form } => {
                let f = parse::parse_form(form)?;
                let irreducible = formclass::is_irreducible(&f).ok();
                let factors = formclass::factor_over_z(&f).ok().map(|fac| {
                    json!({
                        "unit": fac.unit,
                        "content": fac.content.to_string(),
                        "factors": fac
                            .factors
                            .iter()
                            .map(|(g, m)| json!({"form": g.to_string(), "multiplicity": m}))
                            .collect::<Vec<_>>(),
                    })
                });
                let v = json!({
                    "form": f.to_string(),
                    "degree": f.degree(),
                    "content": f.content().to_string(),
                    "disc": f.disc().to_string(),
                    "disc_mod": f.disc_mod().to_string(),
                    "irreducible": irreducible,
                    "factorization": factors,
                });
                Ok((Output::Json(v), ok))
            }
            FormCmd::Cycletype { form, prime, upto } => {
                let f = parse::parse_form(form)?;
                let mut rows = Vec::new();
                let primes: Vec<u64> = match (prime, upto) {
                    (Some(p), None) => vec![*p],
                    (None, Some(b)) => arith::sieve_primes(*b),
                    _ => bail!("give exactly one of --prime or --upto"),
                };
                for p in primes {
                    let st = formclass::prime_status(&f, p);
                    let row = match st.tag {
                        PrimeTag::Bad => json!({
                            "p": p,
                            "status": "bad",
                            "divides_disc_mod": st.divides_disc_mod,
                            "divides_lead": st.divides_lead,
                            "divides_const": st.divides_const,
                        }),
                        PrimeTag::Good(ct) => json!({
                            "p": p,
                            "status": "good",
                            "cycle_type": ct.parts(),
                        }),
                    };
                    rows.push(row);
                }
                let v = json!({"form": f.to_string(), "entries": rows});
                Ok((Output::Json(v), ok))
            }
            FormCmd::Pset { form, upto } => {
                let f = parse::parse_form(form)?;
                let mut in_set = 0u64;
                let mut out_set = 0u64;
                let mut bad = 0u64;
                let mut rows = Vec::new();
                for p in arith::sieve_primes(*upto) {
                    let tag = match formclass::pset_status(&f, p) {
                        PsetStatus::InSet => {
                            in_set += 1;
                            "in"
                        }
                        PsetStatus::NotInSet => {
                            out_set += 1;
                            "out"
                        }
                        PsetStatus::Bad => {
                            bad += 1;
                            "bad"
                        }
                    };
                    rows.push(json!([p, tag]));
                }
                let v = json!({
                    "form": f.to_string(),
                    "upto": upto,
                    "counts": {"in_set": in_set, "not_in_set": out_set, "bad": bad},
                    "entries": rows,
                });
                Ok((Output::Json(v), ok))
            }
            FormCmd::Density { form, upto, csv } => {
                let f = parse::parse_form(form)?;
                if *csv {
                    let bounds: Vec<u64> =
                        [upto / 8, upto / 4, upto / 2, *upto].into_iter().filter(|&b| b >= 100).collect();
                    let rows = formclass::root_density_checkpoints(&f, &bounds)?;
                    let mut s = String::from("bound,hits,sample,estimate\n");
                    for (b, d) in rows {
                        s.push_str(&format!("{b},{},{},{:.6}\n", d.hits, d.sample, d.value()));
                    }
                    Ok((Output::Csv(s), ok))
                } else {
                    let d = formclass::root_density(&f, *upto)?;
                    let v = json!({
                        "form": f.to_string(),
                        "upto": upto,
                        "hits": d.hits,
                        "sample": d.sample,
                        "estimate": d.value(),
                    });
                    Ok((Output::Json(v), ok))
                }
            }
        },
        Cmd::Rep { cmd } => match cmd {
            RepCmd::Test { form, n } => {
                let f = parse::parse_form(form)?;
                let q = QuadForm::from_binary(&f)?;
                let nb: BigInt = n.parse().map_err(|_| anyhow!("bad integer `{n}`"))?;
                let effort = Effort {
                    max_digits: cfg.digit_bound,
                    ..Effort::default()
                };
                let criterion = match arith::factorize(&nb, &effort) {
                    Ok(nf) => match quadrep::representable_criterion(&q, &nf) {
                        Ok(RepVerdict::Representable) => json!({"verdict": "representable"}),
                        Ok(RepVerdict::NotRepresentable(r)) => {
                            let (prime, exponent): (Option<String>, Option<u64>) = match &r {
                                NotRepReason::ContentMismatch { prime } => {
                                    (Some(prime.to_string()), None)
                                }
                                NotRepReason::TwoAdicParity { exponent } => {
                                    (Some("2".into()), Some(*exponent))
                                }
                                NotRepReason::InertParity { prime, exponent } => {
                                    (Some(prime.to_string()), Some(*exponent))
                                }
                            };
                            json!({
                                "verdict": "not_representable",
                                "reason": r.to_string(),
                                "prime": prime,
                                "exponent": exponent,
                            })
                        }
                        Err(e) => json!({"verdict": "unsupported", "reason": e.to_string()}),
                    },
                    Err(e) => json!({"verdict": "unsupported", "reason": e.to_string()}),
                };
                let brute = match quadrep::representable_bruteforce(&q, &nb, &limits) {
                    Ok(Some((x, y))) => json!({"found": true, "witness": [x.to_string(), y.to_string()]}),
                    Ok(None) => json!({"found": false}),
                    Err(e) => json!({"error": e.to_string()}),
                };
                let agree = match (criterion.get("verdict").and_then(Value::as_str), brute.get("found").and_then(Value::as_bool)) {
                    (Some("representable"), Some(found)) => Some(found),
                    (Some("not_representable"), Some(found)) => Some(!found),
                    _ => None,
                };
                let v = json!({
                    "form": q.to_string(),
                    "n": nb.to_string(),
                    "criterion": criterion,
                    "brute_force": brute,
                    "agree": agree,
                });
                Ok((Output::Json(v), ok))
            }
            RepCmd::ThreeSquares { n } => {
                let nb: BigUint = n.parse().map_err(|_| anyhow!("bad nonnegative integer `{n}`"))?;
                let v = json!({
                    "n": nb.to_string(),
                    "sum_of_three_squares": quadrep::is_sum_three_squares(&nb),
                });
                Ok((Output::Json(v), ok))
            }
        },
        Cmd::Fact { cmd } => match cmd {
            FactCmd::Profile { kind, l } => {
                let parsed = parse::parse_rhs(kind)?;
                let k = match parsed {
                    RhsSpec::Hseq(k) => k,
                    _ => bail!("--kind must be factorial | lcm | primorial | multinomial:a"),
                };
                let v = genfact::hseq_profile(k, *l, &limits)?;
                let out = json!({
                    "kind": k.to_string(),
                    "l": l,
                    "exponents": fv_pairs(&v),
                    "log_value": v.log_value(),
                });
                Ok((Output::Json(out), ok))
            }
        },
        Cmd::Pik { cmd } => match cmd {
            PikCmd::Profile { delta, table, l } => {
                let field = resolve_field(*delta, table.as_deref())?;
                let v = genfact::pi_profile(&field, *l, &limits)?;
                let out = json!({
                    "field": field.describe(),
                    "l": l,
                    "exponents": fv_pairs(&v),
                    "log_value": v.log_value(),
                });
                Ok((Output::Json(out), ok))
            }
            PikCmd::Count { delta, table, n } => {
                let field = resolve_field(*delta, table.as_deref())?;
                let count = genfact::ideal_count(&field, *n)?;
                let out = json!({"field": field.describe(), "n": n, "count": count});
                Ok((Output::Json(out), ok))
            }
        },
        Cmd::Bharg { cmd } => match cmd {
            BhargCmd::Profile { set, l, primes } => {
                let s = resolve_set(set)?;
                let b = primes.unwrap_or(cfg.prime_bound);
                let vals = bhargava::valuations_upto(&s, *l, b, cfg.window_multiplier)?;
                let prof = bhargava::profile_from(&vals, *l);
                let out = json!({
                    "set": s.describe(),
                    "l": l,
                    "prime_bound": b,
                    "exponents": fv_pairs(&prof.vector),
                    "truncated_at": prof.truncated_at,
                    "unstable_primes": prof.unstable_primes,
                    "log_value": prof.vector.log_value(),
                });
                Ok((Output::Json(out), ok))
            }
            BhargCmd::Order { set, p, len } => {
                let s = resolve_set(set)?;
                let seq = bhargava::p_ordering_opts(&s, *p, *len, cfg.window_multiplier)?;
                let out = json!({
                    "set": s.describe(),
                    "prime": seq.prime,
                    "ordering": seq.ordering,
                    "valuations": seq.values,
                    "stable": seq.stable,
                });
                Ok((Output::Json(out), ok))
            }
            BhargCmd::Growth {
                set,
                range,
                primes,
                csv,
            } => {
                let s = resolve_set(set)?;
                let (lo, hi) = parse_range(range)?;
                let b = primes.unwrap_or(cfg.prime_bound);
                let rows = bhargava::radical_growth_report(&s, lo, hi, b)?;
                if *csv {
                    let mut text = String::from("l,log_radical,log_value,ratio,truncated\n");
                    for r in &rows {
                        text.push_str(&format!(
                            "{},{:.6},{:.6},{:.6},{}\n",
                            r.l, r.log_radical, r.log_value, r.ratio, r.truncated
                        ));
                    }
                    Ok((Output::Csv(text), ok))
                } else {
                    let out = json!({
                        "set": s.describe(),
                        "prime_bound": b,
                        "rows": rows,
                    });
                    Ok((Output::Json(out), ok))
                }
            }
        },
        Cmd::Hunt { cmd } => match cmd {
            HuntCmd::Brocard { poly, lmax } => {
                let p = parse::parse_poly(poly)?;
                let mut report = hunt::brocard_search(&p, *lmax, &limits)?;
                strip_meta(&mut report, cli.no_meta);
                let code = exit_for(&report);
                Ok((Output::Json(serde_json::to_value(&report)?), code))
            }
            HuntCmd::Certify(args) => {
                let f = parse::parse_form(&args.form)?;
                let rhs = resolve_rhs(&args.rhs, args.primes.unwrap_or(cfg.prime_bound))?;
                let (lo, hi) = parse_range(&args.range)?;
                let opts = CertifyOptions {
                    norm_form_rule: args.norm_form,
                };
                let mut report = hunt::certificate_search(&f, &rhs, lo, hi, &opts, &limits)?;
                strip_meta(&mut report, cli.no_meta);
                let code = exit_for(&report);
                Ok((Output::Json(serde_json::to_value(&report)?), code))
            }
            HuntCmd::Family { arange } => {
                let (lo, hi) = parse_range(arange)?;
                let report = hunt::family_check(lo, hi, &limits)?;
                Ok((Output::Json(serde_json::to_value(&report)?), ok))
            }
            HuntCmd::Gaps {
                residue,
                form,
                range,
                ratio,
                csv,
            } => {
                let (lo, hi) = parse_range(range)?;
                let ratio = ratio.unwrap_or(cfg.ratio);
                let parsed_form = form.as_deref().map(parse::parse_form).transpose()?;
                let (class, label) = match (residue, &parsed_form) {
                    (Some(r), None) => {
                        let (a, b) = parse_range(r)?;
                        (GapClass::Residue { a, b }, format!("{a} mod {b}"))
                    }
                    (None, Some(f)) => (GapClass::FormPset(f), format!("pset({f})")),
                    _ => bail!("give exactly one of --residue a:b or --form F"),
                };
                let violations = hunt::bertrand_gap_check(&class, lo, hi, ratio, &limits)?;
                if *csv {
                    let mut text = String::from("violating_prime\n");
                    for p in &violations {
                        text.push_str(&format!("{p}\n"));
                    }
                    Ok((Output::Csv(text), ok))
                } else {
                    let out = json!({
                        "class": label,
                        "range": {"lo": lo, "hi": hi},
                        "ratio": ratio,
                        "violations": violations,
                    });
                    Ok((Output::Json(out), ok))
                }
            }
            HuntCmd::Parity { delta, rhs, range } => {
                let rhs = resolve_rhs(rhs, cfg.prime_bound)?;
                let (lo, hi) = parse_range(range)?;
                let report = hunt::parity_blocker(*delta, &rhs, lo, hi, &limits)?;
                Ok((Output::Json(serde_json::to_value(&report)?), ok))
            }
        },
    }
}

fn parse_range(s: &str) -> anyhow::Result<(u64, u64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("expected lo:hi, got `{s}`"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn resolve_field(delta: Option<i64>, table: Option<&std::path::Path>) -> anyhow::Result<FieldSplitting> {
    match (delta, table) {
        (Some(d), None) => Ok(FieldSplitting::quadratic(d)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading table {}", path.display()))?;
            Ok(FieldSplitting::Table(SplittingTable::parse(&text)?))
        }
        _ => bail!("give exactly one of --delta or --table"),
    }
}

fn resolve_set(descriptor: &str) -> anyhow::Result<BhargavaSet> {
    match parse::parse_set_descriptor(descriptor)? {
        SetDescriptor::Ready(s) => Ok(s),
        SetDescriptor::WindowFile(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading window file {path}"))?;
            Ok(BhargavaSet::window(parse::parse_window_values(&text)?)?)
        }
    }
}

fn resolve_rhs(descriptor: &str, prime_bound: u64) -> anyhow::Result<RhsKind> {
    Ok(match parse::parse_rhs(descriptor)? {
        RhsSpec::Hseq(k) => RhsKind::Hseq(k),
        RhsSpec::PiQuadratic(d) => RhsKind::Pi(FieldSplitting::quadratic(d)?),
        RhsSpec::PiTableFile(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading table {path}"))?;
            RhsKind::Pi(FieldSplitting::Table(SplittingTable::parse(&text)?))
        }
        RhsSpec::Set(desc) => {
            let set = match desc {
                SetDescriptor::Ready(s) => s,
                SetDescriptor::WindowFile(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading window file {path}"))?;
                    BhargavaSet::window(parse::parse_window_values(&text)?)?
                }
            };
            RhsKind::Bhargava {
                set,
                prime_bound,
            }
        }
    })
}
