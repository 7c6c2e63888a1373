//! Object summaries and Green operator dumps.

use exactla::SVec;
use latfield::complex::{Cell, CubicalComplex, Support};
use latfield::gauge::{gauge_group_obstruction, ObjectSpec, SpacetimeObject};
use latfield::green::{green, propagator, GreenDirection};
use latfield::homology::betti_numbers;
use latfield::phasespace::{Model, Variant};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{count, ratio};

pub fn load_object(path: &std::path::Path) -> Result<SpacetimeObject, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let spec: ObjectSpec = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    SpacetimeObject::new(spec).map_err(|e| CliError::Config(e.to_string()))
}

/// Cell counts, margins, Betti numbers, gauge obstruction and optionally phase-space dimensions.
pub fn describe(obj: SpacetimeObject, phase_space: bool) -> Result<Value, CliError> {
    let x = &obj.complex;
    let degrees = 0..=x.dim();
    let margin: Vec<usize> = degrees.clone().map(|k| (0..x.count(k)).filter(|&i| x.is_margin(k, i)).count()).collect();
    let obstruction = gauge_group_obstruction(&obj)?;
    let mut out = json!({
        "id": obj.id(),
        "factors": x.factors().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "dimension": x.dim(),
        "cells": x.counts(),
        "margin_cells": margin,
        "euler_characteristic": x.euler_characteristic(),
        "betti": {
            "full": betti_numbers(x, Support::Full),
            "compact": betti_numbers(x, Support::Compact),
            "timelike_compact": betti_numbers(x, Support::TimelikeCompact),
        },
        "group": { "torus": obj.group.torus, "real": obj.group.real },
        "flux": obj.spec.flux,
        "large_gauge": {
            "free_rank": obstruction.free_rank,
            "torsion": obstruction.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        },
    });
    if phase_space {
        let comps = obj.components();
        let kinematic = 1 + comps * x.free_cells(1, Support::Compact).len();
        let m = Model::new(obj);
        let mut dims = json!({
            "ekin": count(kinematic),
            "einv": count(1 + m.einv_theorem()?.dim()),
            "E": count(m.phase_space(Variant::Standard)?.dim()),
        });
        if m.obj.group.real == 0 {
            dims["E0"] = json!(count(m.phase_space(Variant::ChargeZero)?.dim()));
        }
        out["phase_space"] = dims;
    }
    Ok(out)
}

/// A cell written as comma-separated `v<pos>` / `e<pos>` entries, one per factor.
pub fn cell_label(x: &CubicalComplex, k: usize, i: usize) -> String {
    x.cell(k, i).parts(x.nfactors()).iter().map(|&(e, p)| format!("{}{p}", if e { 'e' } else { 'v' })).collect::<Vec<_>>().join(",")
}

/// Parse a cell written as comma-separated `v<pos>` / `e<pos>` entries, one per factor.
pub fn parse_cell(s: &str, nfactors: usize) -> Result<Cell, CliError> {
    let bad = || CliError::Config(format!("cannot parse cell {s:?}; expected {nfactors} entries like v3 or e2"));
    let parts: Vec<(bool, usize)> = s
        .split(',')
        .map(|p| {
            let p = p.trim();
            let edge = match p.chars().next() {
                Some('e') => true,
                Some('v') => false,
                _ => return Err(bad()),
            };
            p[1..].parse::<usize>().map(|n| (edge, n)).map_err(|_| bad())
        })
        .collect::<Result<_, _>>()?;
    if parts.len() != nfactors {
        return Err(bad());
    }
    Ok(Cell::new(&parts))
}

/// `G⁺`, `G⁻` and `G` applied to the indicator of one compact cell.
pub fn dump_green(obj: &SpacetimeObject, cell: &str) -> Result<Value, CliError> {
    let x = &obj.complex;
    let c = parse_cell(cell, x.nfactors())?;
    let k = c.dim();
    let i = x.index_of(&c).ok_or_else(|| CliError::Config(format!("cell {cell:?} is not in the complex")))?;
    let src = SVec::unit(i);
    let g = &obj.green;
    let values = |v: SVec| -> Value {
        Value::Array(
            v.iter()
                .map(|(j, q)| json!([cell_label(x, k, j), ratio(q)]))
                .collect(),
        )
    };
    Ok(json!({
        "object": obj.id(),
        "cell": cell,
        "degree": k,
        "retarded": values(green(x, g, k, GreenDirection::Retarded, &src, 1)?),
        "advanced": values(green(x, g, k, GreenDirection::Advanced, &src, 1)?),
        "propagator": values(propagator(x, g, k, &src, 1)?),
    }))
}
