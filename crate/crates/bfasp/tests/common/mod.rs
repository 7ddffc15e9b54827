#![allow(dead_code)]

use std::collections::BTreeSet;

use bfasp::pipeline::{compile, Compiled, Mode};
use bfasp_core::analysis::{build_dep_graph, check_validity};
use bfasp_core::flatten::flat;
use bfasp_core::ground::GroundProgram;
use bfasp_core::grounder::ground_exhaustive;
use bfasp_core::oracle::{stable_set, var_names, OracleError};
use bfasp_core::{Program, ProgramError};

/// Guess budget per oracle call; larger instances are skipped.
pub const CAP: u64 = 20_000;

#[derive(Debug)]
pub enum Outcome {
    Agree,
    Skip(&'static str),
    Disagree(String),
}

fn skip_program_error(e: &ProgramError) -> &'static str {
    match e {
        ProgramError::InvalidProgram { .. } => "invalid",
        ProgramError::UnsupportedRuleForm { .. } | ProgramError::UnmatchedRuleForm { .. } => "unsupported",
        _ => "error",
    }
}

fn stable(g: &GroundProgram, keep: &BTreeSet<String>) -> Result<BTreeSet<std::collections::BTreeMap<String, bfasp_core::Value>>, &'static str> {
    stable_set(g, keep, CAP).map_err(|e| match e {
        OracleError::CapExceeded { .. } => "cap",
        _ => "oracle",
    })
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return Outcome::Skip(s),
        }
    };
}

/// Stable solutions of `flat(p)` restricted to the variables of `p` equal
/// those of `p`.
pub fn flattening_preserves_stable_sets(p: &Program) -> Outcome {
    if let Err(e) = check_validity(p, &build_dep_graph(p)) {
        return Outcome::Skip(skip_program_error(&e));
    }
    let fp = tri!(flat(p).map_err(|e| skip_program_error(&e)));
    let gp = tri!(ground_exhaustive(p).map_err(|e| skip_program_error(&e))).program;
    let gf = tri!(ground_exhaustive(&fp).map_err(|e| skip_program_error(&e))).program;
    let keep: BTreeSet<String> = var_names(&gp).intersection(&var_names(&gf)).cloned().collect();
    let a = tri!(stable(&gp, &keep));
    let b = tri!(stable(&gf, &keep));
    if a == b {
        Outcome::Agree
    } else {
        Outcome::Disagree(format!("original {} solutions, flat {} solutions\n{a:?}\n{b:?}", a.len(), b.len()))
    }
}

pub struct Modes {
    pub exhaustive: Compiled,
    pub bottom_up: Compiled,
    pub magic: Compiled,
}

pub fn compile_all(p: &Program) -> Result<Modes, &'static str> {
    let c = |m| compile(p, m).map_err(|e| skip_program_error(&e));
    Ok(Modes { exhaustive: c(Mode::Exhaustive)?, bottom_up: c(Mode::BottomUp)?, magic: c(Mode::Magic)? })
}

fn projected_equal(full: &GroundProgram, part: &GroundProgram, what: &str) -> Outcome {
    let keep = var_names(part);
    if let Some(x) = keep.difference(&var_names(full)).next() {
        return Outcome::Disagree(format!("{what}: variable {x} missing from the larger program"));
    }
    let a = tri!(stable(full, &keep));
    let b = tri!(stable(part, &keep));
    let lost = a.difference(&b).count();
    let extra = b.difference(&a).count();
    if lost == 0 && extra == 0 {
        Outcome::Agree
    } else {
        Outcome::Disagree(format!("{what}: {lost} projected solutions missing, {extra} spurious"))
    }
}

/// Bottom-up output has the stable solutions of the exhaustive output,
/// restricted to its own variables.
pub fn bottom_up_sound(m: &Modes) -> Outcome {
    projected_equal(&m.exhaustive.result.program, &m.bottom_up.result.program, "bottom-up")
}

/// Magic output has the stable solutions of the exhaustive output restricted
/// to its own variables, in both directions.
pub fn magic_sound(m: &Modes) -> Outcome {
    projected_equal(&m.exhaustive.result.program, &m.magic.result.program, "magic")
}

/// `(rule id, binding)` sets: magic within bottom-up within exhaustive.
pub fn contained(m: &Modes) -> bool {
    m.magic.result.instances.is_subset(&m.bottom_up.result.instances)
        && m.bottom_up.result.instances.is_subset(&m.exhaustive.result.instances)
}
