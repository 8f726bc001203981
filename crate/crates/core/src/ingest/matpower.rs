//! MATPOWER case-file subset: `mpc.baseMVA`, `mpc.bus`, and `mpc.branch`
//! matrix blocks in the `.m` dialect (semicolon-terminated rows, `%`
//! comments, whitespace-separated numeric columns).
//!
//! Column map (1-based, per the MATPOWER format): bus column 1 → bus id,
//! column 2 → bus type; branch columns 1–2 → endpoints, 3–5 → r, x, b,
//! column 11 → status. All other columns are parsed and ignored.

use std::collections::BTreeMap;

use super::IngestError;
use crate::netmodel::ComplexGraph;
use crate::numkernel::{c, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct MatpowerBus {
    pub bus_id: i64,
    pub bus_type: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatpowerBranch {
    pub from_bus: i64,
    pub to_bus: i64,
    /// Series resistance, p.u.
    pub r: f64,
    /// Series reactance, p.u.
    pub x: f64,
    /// Total line charging susceptance, p.u. (ignored by the Laplacian
    /// conversion; kept for inspection).
    pub b: f64,
    pub status: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatpowerCase {
    pub base_mva: f64,
    pub buses: Vec<MatpowerBus>,
    pub branches: Vec<MatpowerBranch>,
}

#[derive(Clone, Copy)]
enum Block {
    None,
    Bus,
    Branch,
}

/// Parses the bus/branch blocks out of a MATPOWER case file.
///
/// Errors carry the 1-based line number of the offending row. `baseMVA`
/// defaults to 100 when absent.
pub fn parse_matpower(text: &str) -> Result<MatpowerCase, IngestError> {
    let mut base_mva = 100.0;
    let mut buses: Vec<MatpowerBus> = Vec::new();
    let mut branches: Vec<MatpowerBranch> = Vec::new();
    let mut saw_bus_block = false;
    let mut saw_branch_block = false;
    let mut block = Block::None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line).trim().to_string();
        if line.is_empty() {
            continue;
        }
        match block {
            Block::None => {
                if let Some(rest) = assignment_rhs(&line, "mpc.baseMVA") {
                    let token = rest.trim_end_matches(';').trim();
                    base_mva = token.parse::<f64>().map_err(|_| IngestError::Matpower {
                        line: line_no,
                        detail: format!("invalid baseMVA value `{token}`"),
                    })?;
                } else if let Some(rest) = assignment_rhs(&line, "mpc.bus") {
                    saw_bus_block = true;
                    block = Block::Bus;
                    consume_rows(rest, line_no, &mut |row, ln| {
                        buses.push(parse_bus_row(row, ln)?);
                        Ok(())
                    })?
                    .then_close(&mut block);
                } else if let Some(rest) = assignment_rhs(&line, "mpc.branch") {
                    saw_branch_block = true;
                    block = Block::Branch;
                    consume_rows(rest, line_no, &mut |row, ln| {
                        branches.push(parse_branch_row(row, ln)?);
                        Ok(())
                    })?
                    .then_close(&mut block);
                }
                // anything else (version, gen, gencost, function header) is
                // parsed and ignored
            }
            Block::Bus => {
                consume_rows(&line, line_no, &mut |row, ln| {
                    buses.push(parse_bus_row(row, ln)?);
                    Ok(())
                })?
                .then_close(&mut block);
            }
            Block::Branch => {
                consume_rows(&line, line_no, &mut |row, ln| {
                    branches.push(parse_branch_row(row, ln)?);
                    Ok(())
                })?
                .then_close(&mut block);
            }
        }
    }

    if !saw_bus_block {
        return Err(IngestError::MissingBlock("mpc.bus"));
    }
    if !saw_branch_block {
        return Err(IngestError::MissingBlock("mpc.branch"));
    }
    Ok(MatpowerCase {
        base_mva,
        buses,
        branches,
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// `mpc.bus = [...` handling: returns the text after `=` when the line
/// starts the named assignment.
fn assignment_rhs<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(name)?;
    // reject prefixes of longer names (`mpc.branch` vs `mpc.br`)
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('=')?;
    Some(rest.trim_start())
}

struct RowsOutcome {
    closed: bool,
}

impl RowsOutcome {
    fn then_close(self, block: &mut Block) {
        if self.closed {
            *block = Block::None;
        }
    }
}

/// Feeds semicolon-separated rows from one line into `push`, stopping at
/// the closing `];`. Returns whether the block closed on this line.
fn consume_rows(
    text: &str,
    line_no: usize,
    push: &mut dyn FnMut(&str, usize) -> Result<(), IngestError>,
) -> Result<RowsOutcome, IngestError> {
    let mut body = text.trim();
    body = body.strip_prefix('[').unwrap_or(body);
    let closed = body.contains(']');
    if let Some(pos) = body.find(']') {
        body = &body[..pos];
    }
    for row in body.split(';') {
        let row = row.trim();
        if !row.is_empty() {
            push(row, line_no)?;
        }
    }
    Ok(RowsOutcome { closed })
}

fn numeric_columns(row: &str, line: usize) -> Result<Vec<f64>, IngestError> {
    row.split_whitespace()
        .map(|token| {
            token.parse::<f64>().map_err(|_| IngestError::Matpower {
                line,
                detail: format!("non-numeric token `{token}`"),
            })
        })
        .collect()
}

fn integral(value: f64, what: &str, line: usize) -> Result<i64, IngestError> {
    if value.fract() != 0.0 || !value.is_finite() || value.abs() > i64::MAX as f64 {
        return Err(IngestError::Matpower {
            line,
            detail: format!("{what} must be an integer, got {value}"),
        });
    }
    Ok(value as i64)
}

fn parse_bus_row(row: &str, line: usize) -> Result<MatpowerBus, IngestError> {
    let cols = numeric_columns(row, line)?;
    if cols.len() < 2 {
        return Err(IngestError::Matpower {
            line,
            detail: format!("bus row has {} columns, need at least 2", cols.len()),
        });
    }
    Ok(MatpowerBus {
        bus_id: integral(cols[0], "bus id", line)?,
        bus_type: integral(cols[1], "bus type", line)? as i32,
    })
}

fn parse_branch_row(row: &str, line: usize) -> Result<MatpowerBranch, IngestError> {
    let cols = numeric_columns(row, line)?;
    if cols.len() < 11 {
        return Err(IngestError::Matpower {
            line,
            detail: format!("branch row has {} columns, need at least 11", cols.len()),
        });
    }
    Ok(MatpowerBranch {
        from_bus: integral(cols[0], "from bus", line)?,
        to_bus: integral(cols[1], "to bus", line)?,
        r: cols[2],
        x: cols[3],
        b: cols[4],
        status: cols[10] != 0.0,
    })
}

/// Admittance graph of a case: undirected, edge weight `y = 1/(r + jx)` per
/// active branch, parallel branches summed.
///
/// Shunt and charging elements, taps, and shifts are excluded so that the
/// resulting Laplacian has exactly zero row sums. Bus ids map to node
/// indices in order of appearance in the bus block and become node labels.
/// A disconnected result is not an error here; connectivity is reported by
/// the graph classification downstream.
pub fn matpower_to_graph(case: &MatpowerCase) -> Result<ComplexGraph, IngestError> {
    let mut index_of: BTreeMap<i64, usize> = BTreeMap::new();
    let mut labels = Vec::with_capacity(case.buses.len());
    for bus in &case.buses {
        if index_of.insert(bus.bus_id, labels.len()).is_some() {
            return Err(IngestError::DuplicateBusId(bus.bus_id));
        }
        labels.push(bus.bus_id.to_string());
    }
    let mut weights: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for branch in &case.branches {
        if !branch.status {
            continue;
        }
        let &from = index_of
            .get(&branch.from_bus)
            .ok_or(IngestError::UnknownBus(branch.from_bus))?;
        let &to = index_of
            .get(&branch.to_bus)
            .ok_or(IngestError::UnknownBus(branch.to_bus))?;
        let z = c(branch.r, branch.x);
        if z.norm() == 0.0 {
            return Err(IngestError::ZeroImpedance {
                from: branch.from_bus,
                to: branch.to_bus,
            });
        }
        if from == to {
            return Err(IngestError::Matpower {
                line: 0,
                detail: format!("branch {0}-{0} is a self-loop", branch.from_bus),
            });
        }
        let y = c(1.0, 0.0) / z;
        let key = (from.min(to), from.max(to));
        *weights.entry(key).or_insert(c(0.0, 0.0)) += y;
    }
    let edges: Vec<(usize, usize, Scalar)> = weights
        .into_iter()
        .filter(|(_, w)| *w != c(0.0, 0.0)) // exact parallel cancellation is a non-edge
        .map(|((a, b), w)| (a, b, w))
        .collect();
    Ok(ComplexGraph::new(
        labels.len(),
        false,
        &edges,
        Some(labels),
    )?)
}
