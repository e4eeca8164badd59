use std::io::{self, Write};

use serde::Serialize;

use super::runner::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Csv,
    JsonLines,
}

/// Provenance written at the top of every trajectory file.
#[derive(Debug, Clone, Serialize)]
pub struct RunHeader {
    pub rng: String,
    pub seed: u64,
    pub spec_sha256: String,
    pub mode: String,
    pub replicates: u64,
}

#[derive(Serialize)]
struct Row<'a> {
    replicate: u64,
    n: u64,
    t: f64,
    x: &'a [f64],
    drawn: &'a [u64],
    status: &'static str,
}

/// Writes one row per checkpoint. CSV output starts with `#` comment lines
/// carrying the header; JSON-lines output starts with a `{"header": ...}` line.
pub fn write_trajectories<W: Write>(
    out: &mut W,
    header: &RunHeader,
    trajectories: &[Trajectory],
    q: usize,
    format: TrajectoryFormat,
) -> io::Result<()> {
    match format {
        TrajectoryFormat::Csv => {
            writeln!(out, "# rng={} seed={} spec_sha256={}", header.rng, header.seed, header.spec_sha256)?;
            writeln!(out, "# mode={} replicates={}", header.mode, header.replicates)?;
            let mut cols = vec!["replicate".to_string(), "n".into(), "t".into()];
            cols.extend((0..q).map(|i| format!("X_{i}")));
            cols.extend((0..q).map(|i| format!("N_{i}")));
            cols.push("status".into());
            writeln!(out, "{}", cols.join(","))?;
            for tr in trajectories {
                let last = tr.checkpoints.len().saturating_sub(1);
                for (k, c) in tr.checkpoints.iter().enumerate() {
                    let status = if k == last { tr.status().label() } else { "running" };
                    let mut fields = vec![tr.replicate.to_string(), c.n.to_string(), c.t.to_string()];
                    fields.extend(c.x.iter().map(|v| v.to_string()));
                    fields.extend(c.drawn.iter().map(|v| v.to_string()));
                    fields.push(status.to_string());
                    writeln!(out, "{}", fields.join(","))?;
                }
            }
        }
        TrajectoryFormat::JsonLines => {
            serde_json::to_writer(&mut *out, &serde_json::json!({ "header": header }))?;
            writeln!(out)?;
            for tr in trajectories {
                let last = tr.checkpoints.len().saturating_sub(1);
                for (k, c) in tr.checkpoints.iter().enumerate() {
                    let row = Row {
                        replicate: tr.replicate,
                        n: c.n,
                        t: c.t,
                        x: &c.x,
                        drawn: &c.drawn,
                        status: if k == last { tr.status().label() } else { "running" },
                    };
                    serde_json::to_writer(&mut *out, &row)?;
                    writeln!(out)?;
                }
            }
        }
    }
    Ok(())
}
