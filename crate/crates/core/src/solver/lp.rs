//! CPLEX-LP rendering of the lane-allocation MILP.
//!
//! Per slot `t` and direction `d` in `{f, r}` the model declares
//! `y_d_t`, `v_d_t`, `a_d_t` (general integers) and `s_d_t`, `w_d_t`
//! (continuous, non-negative).

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::corridor::{CorridorSpec, DemandSeries, InitialState};
use crate::cost::CostWeights;
use crate::error::Result;

const TERMS_PER_LINE: usize = 6;

fn push_terms(out: &mut String, terms: &[String]) {
    for (i, term) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => ("-", rest),
            None => ("+", term.as_str()),
        };
        if i == 0 {
            if sign == "-" {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        out.push_str(body);
    }
}

fn var(kind: char, dir: char, t: usize) -> String {
    format!("{kind}_{dir}_{t}")
}

/// Renders the model as CPLEX-LP text.
pub fn write_lp<W: Write>(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &CostWeights,
    init: &InitialState,
    mut writer: W,
) -> Result<()> {
    spec.validate()?;
    weights.validate()?;
    demand.check_horizon(spec)?;
    init.validate(spec)?;
    let horizon = spec.horizon;
    let lanes = spec.lane_count;
    let k = spec.lane_throughput;
    let tau = spec.flush_slots as i64;
    let dirs = [('f', 0usize), ('r', 1usize)];

    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ Directional lane allocation on corridor {}-{}: {} slots, {} lanes, K={}, flush={}",
        spec.node_i, spec.node_j, horizon, lanes, k, spec.flush_slots
    );
    out.push_str("Minimize\n obj: ");
    let mut obj = Vec::new();
    for t in 0..horizon {
        for (d, _) in dirs {
            obj.push(format!("{} {}", weights.c_unserved, var('s', d, t)));
            obj.push(format!("{} {}", weights.c_switch, var('v', d, t)));
            obj.push(format!("{} {}", weights.c_waste, var('w', d, t)));
        }
    }
    push_terms(&mut out, &obj);
    out.push_str("\nSubject To\n");

    for t in 0..horizon {
        // Active plus flushing lanes within the budget.
        let mut terms = vec![var('y', 'f', t), var('y', 'r', t)];
        let mut carried = 0u32;
        for j in (t as i64 - tau + 1)..=(t as i64) {
            if j < 0 {
                carried += init.history_total(spec, j);
            } else {
                terms.push(var('v', 'f', j as usize));
                terms.push(var('v', 'r', j as usize));
            }
        }
        let _ = write!(out, " cap_{t}: ");
        push_terms(&mut out, &terms);
        let _ = writeln!(out, " <= {}", lanes as i64 - carried as i64);

        for (d, idx) in dirs {
            // Lane-state evolution.
            let _ = write!(out, " evo_{d}_{t}: ");
            let mut terms = vec![var('y', d, t)];
            if t > 0 {
                terms.push(format!("-{}", var('y', d, t - 1)));
            }
            terms.push(var('v', d, t));
            terms.push(format!("-{}", var('a', d, t)));
            push_terms(&mut out, &terms);
            let rhs = if t == 0 {
                if idx == 0 {
                    init.y0_fwd
                } else {
                    init.y0_rev
                }
            } else {
                0
            };
            let _ = writeln!(out, " = {rhs}");

            // Goal-programming balance: K y - F = w - s.
            let _ = write!(out, " bal_{d}_{t}: ");
            push_terms(
                &mut out,
                &[
                    format!("{k} {}", var('y', d, t)),
                    format!("-{}", var('w', d, t)),
                    var('s', d, t),
                ],
            );
            let f = if idx == 0 {
                demand.fwd[t]
            } else {
                demand.rev[t]
            };
            let _ = writeln!(out, " = {f}");
        }
    }

    out.push_str("Bounds\n");
    for t in 0..horizon {
        for (d, _) in dirs {
            for kind in ['y', 'v', 'a'] {
                let _ = writeln!(out, " 0 <= {} <= {lanes}", var(kind, d, t));
            }
            for kind in ['s', 'w'] {
                let _ = writeln!(out, " {} >= 0", var(kind, d, t));
            }
        }
    }
    out.push_str("Generals\n");
    let mut generals = Vec::new();
    for t in 0..horizon {
        for (d, _) in dirs {
            for kind in ['y', 'v', 'a'] {
                generals.push(var(kind, d, t));
            }
        }
    }
    for chunk in generals.chunks(TERMS_PER_LINE * 2) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");

    writer.write_all(out.as_bytes())?;
    writer.flush()?;
    Ok(())
}

/// Writes the model to `path`.
pub fn export_lp(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &CostWeights,
    init: &InitialState,
    path: impl AsRef<Path>,
) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_lp(spec, demand, weights, init, std::io::BufWriter::new(f))
}
