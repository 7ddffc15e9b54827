//! parse, bind, validity gate, flatten, ground, with per-phase timing.

use std::fmt;
use std::time::{Duration, Instant};

use bfasp_core::analysis::{build_dep_graph, check_validity};
use bfasp_core::flatten::flat;
use bfasp_core::grounder::{ground, ground_exhaustive, GroundResult};
use bfasp_core::magic::apply_magic;
use bfasp_core::oracle::OracleError;
use bfasp_core::{Program, ProgramError};
use thiserror::Error;

use crate::frontend::{self, FrontendError};
use crate::groundfmt::FormatError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Exhaustive,
    BottomUp,
    Magic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::BottomUp => "bottom-up",
            Mode::Magic => "magic",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Frontend(#[from] FrontendError),
    #[error("{0}")]
    Program(#[from] ProgramError),
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// 2 parse, 3 data, 4 invalid program, 5 unsupported rule form, 6 oracle cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Frontend(e) if e.kind.is_data() => 3,
            PipelineError::Frontend(_) | PipelineError::Format(_) => 2,
            PipelineError::Program(ProgramError::InvalidProgram { .. }) => 4,
            PipelineError::Program(ProgramError::UnsupportedRuleForm { .. } | ProgramError::UnmatchedRuleForm { .. }) => 5,
            PipelineError::Program(_) => 3,
            PipelineError::Oracle(OracleError::CapExceeded { .. }) => 6,
            PipelineError::Oracle(_) => 3,
            PipelineError::Io(_) => 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    pub ground_rules: usize,
    pub ground_constraints: usize,
    pub ground_vars: usize,
    pub created_founded: usize,
    pub instances: usize,
    pub flat_rules: usize,
    pub magic_rules: usize,
    pub magic_atoms: usize,
    pub phases: Vec<(&'static str, Duration)>,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ground rules: {}", self.ground_rules)?;
        writeln!(f, "ground constraints: {}", self.ground_constraints)?;
        writeln!(f, "ground variables: {}", self.ground_vars)?;
        writeln!(f, "created founded variables: {}", self.created_founded)?;
        writeln!(f, "rule instances: {}", self.instances)?;
        writeln!(f, "flat rules: {}", self.flat_rules)?;
        writeln!(f, "magic rules generated: {}", self.magic_rules)?;
        writeln!(f, "magic atoms derived: {}", self.magic_atoms)?;
        for (name, d) in &self.phases {
            writeln!(f, "time {name}: {:.3} ms", d.as_secs_f64() * 1e3)?;
        }
        Ok(())
    }
}

pub struct Compiled {
    pub flat: Program,
    pub result: GroundResult,
    pub stats: Stats,
}

fn timed<T>(phases: &mut Vec<(&'static str, Duration)>, name: &'static str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    phases.push((name, t.elapsed()));
    out
}

/// Validity gate, flattening and grounding of a bound program.
pub fn compile(p: &Program, mode: Mode) -> Result<Compiled, ProgramError> {
    let mut phases = Vec::new();
    timed(&mut phases, "analyze", || check_validity(p, &build_dep_graph(p)))?;
    let fp = timed(&mut phases, "flatten", || flat(p))?;
    let mut magic = None;
    let result = timed(&mut phases, "ground", || match mode {
        Mode::Exhaustive => ground_exhaustive(&fp),
        Mode::BottomUp => ground(&fp),
        Mode::Magic => apply_magic(&fp).map(|(r, s)| {
            magic = Some(s);
            r
        }),
    })?;
    let g = &result.program;
    let stats = Stats {
        ground_rules: g.rules.len(),
        ground_constraints: g.constraints.len(),
        ground_vars: g.vars.len(),
        created_founded: result.created.len(),
        instances: result.instances.len(),
        flat_rules: fp.rules.len(),
        magic_rules: magic.as_ref().map_or(0, |m| m.magic_rules),
        magic_atoms: magic.as_ref().map_or(0, |m| m.magic_instances),
        phases,
    };
    Ok(Compiled { flat: fp, result, stats })
}

/// Whole pipeline from model and data text.
pub fn run(model: &str, data: &str, mode: Mode) -> Result<Compiled, PipelineError> {
    let t = Instant::now();
    let p = frontend::load(model, data)?;
    let parse_time = t.elapsed();
    let mut c = compile(&p, mode)?;
    c.stats.phases.insert(0, ("parse", parse_time));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NESTED: &str = "set S = 1..3; founded int y[S] in 0..9; std int x[S] in 0..3;
        rule forall (i in S): y[i] >= x[i] + max(y[i] - 1, 0);
        constraint y[2] >= 1;";

    #[test]
    fn modes_are_weakly_decreasing() {
        let counts: Vec<usize> =
            [Mode::Exhaustive, Mode::BottomUp, Mode::Magic].iter().map(|&m| run(NESTED, "", m).unwrap().stats.ground_rules).collect();
        assert!(counts[0] >= counts[1] && counts[1] >= counts[2], "{counts:?}");
        assert!(counts[2] > 0);
    }

    #[test]
    fn exit_codes() {
        let code = |m: &str| run(m, "", Mode::BottomUp).err().unwrap().exit_code();
        assert_eq!(code("founded int a; rule a >= ;"), 2);
        assert_eq!(code("set S = 1..2; param int w[S]; founded int a; rule a >= w[1];"), 3);
        assert_eq!(code("founded int a in 0..3; rule a >= abs(a);"), 4);
        assert_eq!(code("founded int a in 0..3; founded int b in 0..3; rule a >= abs(b);"), 5);
    }
}
