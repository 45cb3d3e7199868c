//! Subcommand implementations. Each returns the text for standard output and
//! the exit code: 0 on success, 1 for a negative domain result.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use pktreorder::{
    ack_sequence, behaviorally_equivalent, fb_equivalent, is_consistent_on, map_m,
    rcv_window_series, reorder_density, segment_episodes, sus_greedy, verify_identities,
    verify_theorem, BufferSequence, Consistency, Error as CoreError, IdSequence, Permutation,
    Threshold, Verdict,
};

use crate::trace::{load_one, load_single, TraceError, TraceFile};
use crate::Format;

const NO_PERMUTATION: &str = "NO PERMUTATION EXISTS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{source_name}: {err}")]
    InvalidTrace { source_name: String, err: CoreError },
    #[error("{0}")]
    Usage(String),
    /// A well-formed request whose analysis failed, e.g. a buffer overflow.
    #[error("{0}")]
    Domain(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::CapacityExceeded { .. } => CliError::Domain(err),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, code: 0 }
    }

    fn negative(body: String) -> Self {
        Self { body, code: 1 }
    }
}

/// Metrics accepted by the consistency check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    /// Reorder density with the given threshold.
    Rd,
    /// Mean buffer size over the trace.
    MeanM,
    /// Largest buffer size over the trace.
    MaxM,
}

fn id_sequence(trace: &TraceFile) -> Result<IdSequence, CliError> {
    IdSequence::from_signed(&trace.values).map_err(|err| CliError::InvalidTrace {
        source_name: trace.path.clone(),
        err,
    })
}

fn load_ids(args: &[String]) -> Result<IdSequence, CliError> {
    id_sequence(&load_single(args)?)
}

fn spaced<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut line = serde_json::to_string(value).expect("report types serialize");
    line.push('\n');
    line
}

fn csv_table<R, I>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer
            .write_record(row.into_iter().collect::<Vec<_>>())
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Per-arrival series shared by `map`, `ack` and `rcvwindow`.
fn series(a: &IdSequence, column: &str, values: &[u64], format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", spaced(values)),
        Format::Json => json_line(&values),
        Format::Csv => csv_table(
            &["position", "id", column],
            a.ids()
                .iter()
                .zip(values)
                .enumerate()
                .map(|(idx, (id, v))| [(idx + 1).to_string(), id.to_string(), v.to_string()]),
        ),
    }
}

pub fn map(args: &[String], format: Format) -> Result<Output, CliError> {
    let a = load_ids(args)?;
    Ok(Output::ok(series(&a, "m", map_m(&a).values(), format)))
}

pub fn ack(args: &[String], format: Format) -> Result<Output, CliError> {
    let a = load_ids(args)?;
    Ok(Output::ok(series(
        &a,
        "ack",
        ack_sequence(&a).values(),
        format,
    )))
}

pub fn sus(args: &[String], format: Format) -> Result<Output, CliError> {
    let a = load_ids(args)?;
    let part = sus_greedy(&a);
    let body = match format {
        Format::Text => {
            let mut out = format!("SUS {}\n", part.u());
            for (idx, list) in part.lists.iter().enumerate() {
                out.push_str(&format!("L{}: {}\n", idx + 1, spaced(list)));
            }
            out
        }
        Format::Json => json_line(&json!({ "sus": part.u(), "lists": part.lists })),
        Format::Csv => csv_table(
            &["list", "id"],
            part.lists.iter().enumerate().flat_map(|(idx, list)| {
                list.iter()
                    .map(move |id| [(idx + 1).to_string(), id.to_string()])
            }),
        ),
    };
    Ok(Output::ok(body))
}

pub fn episodes(args: &[String], format: Format) -> Result<Output, CliError> {
    let a = load_ids(args)?;
    let seg = segment_episodes(&a);
    let positions: Vec<usize> = seg.pivots.iter().copied().collect();
    let pivot_ids = seg.pivot_ids(&a);
    let body = match format {
        Format::Text => {
            let mut out = String::new();
            for e in &seg.episodes {
                out.push_str(&format!("{} {}..{}\n", e.state.symbol(), e.start, e.end));
            }
            out.push_str(&format!("pivot positions: {}\n", spaced(&positions)));
            out.push_str(&format!("pivot packets: {}\n", spaced(&pivot_ids)));
            out
        }
        Format::Json => json_line(&json!({
            "episodes": seg.episodes,
            "pivot_positions": positions,
            "pivot_packets": pivot_ids,
        })),
        Format::Csv => csv_table(
            &["state", "start", "end"],
            seg.episodes.iter().map(|e| {
                [
                    e.state.symbol().to_string(),
                    e.start.to_string(),
                    e.end.to_string(),
                ]
            }),
        ),
    };
    Ok(Output::ok(body))
}

pub fn rd(args: &[String], dt: Threshold, format: Format) -> Result<Output, CliError> {
    let trace = load_single(args)?;
    let perm =
        Permutation::try_from(id_sequence(&trace)?).map_err(|err| CliError::InvalidTrace {
            source_name: trace.path.clone(),
            err,
        })?;
    let dist = reorder_density(&perm, dt)?;
    let body = match format {
        Format::Text => {
            let mut out = format!("dt {}\n", dist.dt);
            for (d, c) in &dist.counts {
                out.push_str(&format!("{d} {c}/{}\n", dist.total));
            }
            out
        }
        Format::Json => json_line(&dist),
        Format::Csv => csv_table(
            &["displacement", "count", "total"],
            dist.counts
                .iter()
                .map(|(d, c)| [d.to_string(), c.to_string(), dist.total.to_string()]),
        ),
    };
    Ok(Output::ok(body))
}

pub fn rcvwindow(args: &[String], rcv_buffer: u64, format: Format) -> Result<Output, CliError> {
    let a = load_ids(args)?;
    let window = rcv_window_series(&a, rcv_buffer)?;
    let body = match format {
        Format::Json => json_line(&window),
        _ => series(&a, "rcv_window", &window.values, format),
    };
    Ok(Output::ok(body))
}

pub fn equiv(first: &str, second: &str, format: Format) -> Result<Output, CliError> {
    let a = id_sequence(&load_one(first)?)?;
    let b = id_sequence(&load_one(second)?)?;
    let fb = fb_equivalent(&a, &b);
    let behavioral = behaviorally_equivalent(&a, &b);
    let body = match format {
        Format::Text => format!("fb-equivalent: {fb}\nbehaviorally-equivalent: {behavioral}\n"),
        Format::Json => json_line(&json!({
            "fb_equivalent": fb,
            "behaviorally_equivalent": behavioral,
        })),
        Format::Csv => csv_table(
            &["fb_equivalent", "behaviorally_equivalent"],
            [[fb.to_string(), behavioral.to_string()]],
        ),
    };
    Ok(Output::ok(body))
}

pub fn reconstruct(args: &[String], format: Format) -> Result<Output, CliError> {
    let trace = load_single(args)?;
    let values = trace
        .values
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            u64::try_from(v).map_err(|_| {
                CliError::Usage(format!(
                    "{}: buffer size {v} at position {} is negative",
                    trace.path,
                    idx + 1
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let w = BufferSequence::new(values);
    let result = pktreorder::reconstruct(&w);
    let body = match (&result, format) {
        (Ok(p), Format::Text) => format!("{p}\n"),
        (Err(_), Format::Text) => format!("{NO_PERMUTATION}\n"),
        (Ok(p), Format::Json) => json_line(&json!({ "permutation": p })),
        (Err(_), Format::Json) => json_line(&json!({ "permutation": null })),
        (Ok(p), Format::Csv) => csv_table(
            &["position", "id"],
            p.ids()
                .iter()
                .enumerate()
                .map(|(idx, id)| [(idx + 1).to_string(), id.to_string()]),
        ),
        (Err(_), Format::Csv) => csv_table(&["position", "id"], Vec::<[String; 2]>::new()),
    };
    Ok(match result {
        Ok(_) => Output::ok(body),
        Err(_) => Output::negative(body),
    })
}

/// Renders a metric value for the text report.
type Describe = Box<dyn Fn(&Permutation) -> String>;

#[derive(Serialize)]
struct CheckLine {
    check: &'static str,
    n: usize,
    result: String,
    witness: Option<String>,
}

pub fn verify(n: usize, format: Format) -> Result<Output, CliError> {
    let mut checks = Vec::new();
    let theorem = verify_theorem(n)?;
    checks.push(CheckLine {
        check: "theorem",
        n,
        result: if theorem.passed() { "pass" } else { "fail" }.into(),
        witness: match &theorem {
            Verdict::Pass => None,
            Verdict::Failure((a, b)) => Some(format!("({a}) ({b})")),
        },
    });
    let mut failed = !theorem.passed();
    if n <= pktreorder::oracle::MAX_IDENTITY_N {
        let identities = verify_identities(n)?;
        failed |= !identities.passed();
        checks.push(CheckLine {
            check: "identities",
            n,
            result: if identities.passed() { "pass" } else { "fail" }.into(),
            witness: match &identities {
                Verdict::Pass => None,
                Verdict::Failure(v) => Some(format!(
                    "({}) {:?}{}",
                    v.permutation,
                    v.identity,
                    v.step.map(|s| format!(" at step {s}")).unwrap_or_default()
                )),
            },
        });
    } else {
        checks.push(CheckLine {
            check: "identities",
            n,
            result: format!("skipped (n > {})", pktreorder::oracle::MAX_IDENTITY_N),
            witness: None,
        });
    }

    let body = match format {
        Format::Text => checks
            .iter()
            .map(|c| match &c.witness {
                Some(w) => format!("{} n={}: {} {}\n", c.check, c.n, c.result, w),
                None => format!("{} n={}: {}\n", c.check, c.n, c.result),
            })
            .collect(),
        Format::Json => checks.iter().map(json_line).collect(),
        Format::Csv => csv_table(
            &["check", "n", "result", "witness"],
            checks.iter().map(|c| {
                [
                    c.check.to_string(),
                    c.n.to_string(),
                    c.result.clone(),
                    c.witness.clone().unwrap_or_default(),
                ]
            }),
        ),
    };
    Ok(if failed {
        Output::negative(body)
    } else {
        Output::ok(body)
    })
}

pub fn consistency(
    metric: Metric,
    dt: Option<Threshold>,
    n: usize,
    format: Format,
) -> Result<Output, CliError> {
    let (label, result, describe): (String, Consistency, Describe) = match metric {
        Metric::Rd => {
            let dt =
                dt.ok_or_else(|| CliError::Usage("the rd metric needs --dt <int|inf>".into()))?;
            // surface a bad threshold before enumerating
            reorder_density(&Permutation::identity(1), dt)?;
            let result = is_consistent_on(|p| reorder_density(p, dt).expect("checked"), n)?;
            (
                format!("rd dt={dt}"),
                result,
                Box::new(move |p| reorder_density(p, dt).expect("checked").to_string()),
            )
        }
        Metric::MeanM => {
            let sum = |p: &Permutation| map_m(p).values().iter().sum::<u64>();
            let result = is_consistent_on(sum, n)?;
            (
                "mean-m".into(),
                result,
                Box::new(move |p| format!("{}/{}", sum(p), p.len())),
            )
        }
        Metric::MaxM => {
            let max = |p: &Permutation| map_m(p).values().iter().max().copied();
            let result = is_consistent_on(max, n)?;
            (
                "max-m".into(),
                result,
                Box::new(move |p| max(p).unwrap_or(0).to_string()),
            )
        }
    };

    let body = match (&result, format) {
        (Consistency::Consistent, Format::Text) => format!("{label} n={n}: consistent\n"),
        (
            Consistency::Counterexample {
                first,
                second,
                image,
            },
            Format::Text,
        ) => format!(
            "{label} n={n}: inconsistent\n({first}) and ({second}) share buffer sequence ({image})\n\
             ({first}): {}\n({second}): {}\n",
            describe(first),
            describe(second)
        ),
        (_, Format::Json) => json_line(&json!({ "metric": label, "n": n, "consistency": result })),
        (Consistency::Consistent, Format::Csv) => csv_table(
            &["metric", "n", "result", "first", "second", "image"],
            [[label.clone(), n.to_string(), "consistent".into(), String::new(), String::new(), String::new()]],
        ),
        (
            Consistency::Counterexample {
                first,
                second,
                image,
            },
            Format::Csv,
        ) => csv_table(
            &["metric", "n", "result", "first", "second", "image"],
            [[
                label.clone(),
                n.to_string(),
                "inconsistent".into(),
                first.to_string(),
                second.to_string(),
                image.to_string(),
            ]],
        ),
    };
    Ok(if result.is_consistent() {
        Output::ok(body)
    } else {
        Output::negative(body)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        vec![s.to_string()]
    }

    #[test]
    fn map_formats() {
        let a = args("1 2 3 6 5 7 4 8 9 10 12 13 14 11");
        assert_eq!(
            map(&a, Format::Text).unwrap().body,
            "0 0 0 3 3 4 0 0 0 0 2 3 4 0\n"
        );
        assert_eq!(
            map(&args("4 3 2 1"), Format::Json).unwrap().body,
            "[4,4,4,0]\n"
        );
        assert_eq!(
            map(&args("2 1"), Format::Csv).unwrap().body,
            "position,id,m\n1,2,2\n2,1,0\n"
        );
    }

    #[test]
    fn invalid_ids_are_input_errors() {
        let err = map(&args("1 2 2"), Format::Text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = map(&args("1 0"), Format::Text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn reconstruct_outcomes() {
        assert_eq!(
            reconstruct(&args("4 4 4 0"), Format::Text).unwrap(),
            Output::ok("4 2 3 1\n".into())
        );
        assert_eq!(
            reconstruct(&args("1"), Format::Text).unwrap(),
            Output::negative("NO PERMUTATION EXISTS\n".into())
        );
        assert_eq!(
            reconstruct(&args("1 -2"), Format::Text)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn rd_text_uses_fractions() {
        let out = rd(&args("4 2 3 1"), Threshold::Infinite, Format::Text).unwrap();
        assert_eq!(out.body, "dt inf\n-3 1/4\n0 2/4\n3 1/4\n");
        // not a permutation
        assert_eq!(
            rd(&args("1 3"), Threshold::Infinite, Format::Text)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn rcvwindow_overflow_is_domain_failure() {
        let err = rcvwindow(&args("4 3 2 1"), 3, Format::Text).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert_eq!(
            rcvwindow(&args("4 3 2 1"), 4, Format::Text).unwrap().body,
            "0 0 0 4\n"
        );
    }

    #[test]
    fn consistency_reports() {
        let out = consistency(Metric::Rd, Some(Threshold::Infinite), 4, Format::Text).unwrap();
        assert_eq!(out.code, 1);
        assert!(out
            .body
            .contains("(4 2 3 1) and (4 3 2 1) share buffer sequence (4 4 4 0)"));
        let out = consistency(Metric::MeanM, None, 5, Format::Text).unwrap();
        assert_eq!(out, Output::ok("mean-m n=5: consistent\n".into()));
        assert_eq!(
            consistency(Metric::Rd, None, 4, Format::Text)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            consistency(Metric::MaxM, None, 12, Format::Text)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn verify_skips_identities_above_seven() {
        let out = verify(4, Format::Text).unwrap();
        assert_eq!(
            out,
            Output::ok("theorem n=4: pass\nidentities n=4: pass\n".into())
        );
        let out = verify(8, Format::Csv).unwrap();
        assert!(out.body.contains("identities,8,skipped (n > 7),"));
    }
}
