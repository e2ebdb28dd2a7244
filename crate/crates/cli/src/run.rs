use std::fmt::Write;

use gmact_core::{
    action_from_derivation, GmAction, RatFunc, SliceResult, Verdict, DEFAULT_DMAX, DEFAULT_ORDER,
};

use crate::error::{CliError, Result};
use crate::session::{Arg, Session, Value, Verb};

/// Exit status of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    NotCertified,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Done => 0,
            Status::NotCertified => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub status: Status,
}

fn bool_word(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn run(session: &Session) -> Result<Outcome> {
    let c = &session.command;
    let fail = |what: &str| {
        let what = format!("{} {}", c.verb.name(), what);
        move |e| CliError::run(c.pos, what, e)
    };
    let target = session.lookup(&c.target).expect("the parser resolved the target");
    let expr_arg = || match &c.arg {
        Some(Arg::Expr(f)) => Some(f),
        _ => None,
    };
    let valid_action = || -> Result<&GmAction> {
        let Value::Action(a) = target else { unreachable!("the parser checked the target kind") };
        if a.verify_identity() && a.verify_cocycle() {
            Ok(a)
        } else {
            Err(CliError::run(
                c.pos,
                c.verb.name(),
                gmact_core::Error::InvalidAction(format!("`{}` fails the action axioms", c.target)),
            ))
        }
    };
    let order = c.order.unwrap_or(DEFAULT_ORDER);
    let dmax = c.dmax.unwrap_or(DEFAULT_DMAX);
    let mut out = String::new();
    let mut status = Status::Done;

    match c.verb {
        Verb::Exp => {
            let Value::Der(d) = target else { unreachable!("the parser checked the target kind") };
            let items: Vec<(String, RatFunc)> = match expr_arg() {
                Some(f) => vec![(format!("({f})"), f.clone())],
                None => (0..session.ctx.nvars())
                    .map(|i| (session.ctx.var_name(i).to_string(), RatFunc::var(&session.ctx, i)))
                    .collect(),
            };
            for (label, f) in items {
                let s = d.exp_series(&f, order);
                let sigma = s.sigma().map_err(fail(&label))?;
                writeln!(out, "EXP {label} = {s}").unwrap();
                writeln!(out, "SIGMA {label} = {sigma}").unwrap();
            }
        }
        Verb::Detect => {
            let Value::Der(d) = target else { unreachable!("the parser checked the target kind") };
            let cert = action_from_derivation(d, order, dmax).map_err(fail(&c.target))?;
            writeln!(out, "{cert}").unwrap();
            match &cert.verdict {
                Verdict::Semisimple { eigenvalues, .. } => {
                    let parts: Vec<String> = eigenvalues
                        .iter()
                        .enumerate()
                        .map(|(i, ev)| match ev {
                            Some(k) => format!("{}={k}", session.ctx.var_name(i)),
                            None => format!("{}=none", session.ctx.var_name(i)),
                        })
                        .collect();
                    writeln!(out, "EIGEN {}", parts.join(" ")).unwrap();
                }
                Verdict::NotCertifiedAtOrder { .. } => status = Status::NotCertified,
            }
        }
        Verb::Extract => {
            let d = valid_action()?.extract_derivation().map_err(fail(&c.target))?;
            writeln!(out, "{d}").unwrap();
        }
        Verb::Slice => match valid_action()?.find_slice().map_err(fail(&c.target))? {
            SliceResult::Slice(s) => writeln!(out, "SLICE {s}").unwrap(),
            SliceResult::LatticeGcd { gcd, witness } => {
                let w = witness.map_or_else(|| "none".to_string(), |w| w.to_string());
                writeln!(out, "LATTICE_GCD {gcd} WITNESS {w}").unwrap();
            }
        },
        Verb::Conjugate => {
            let Some(Arg::Map(name)) = &c.arg else { unreachable!("the parser requires a map") };
            let Some(Value::Map(m)) = session.lookup(name) else {
                unreachable!("the parser checked the map")
            };
            match target {
                Value::Der(d) => writeln!(out, "{}", d.conjugate(m).map_err(fail(&c.target))?).unwrap(),
                _ => writeln!(out, "{}", valid_action()?.conjugate(m).map_err(fail(&c.target))?).unwrap(),
            }
        }
        Verb::Verify => {
            let Value::Action(a) = target else { unreachable!("the parser checked the target kind") };
            writeln!(out, "IDENTITY {}", bool_word(a.verify_identity())).unwrap();
            writeln!(out, "COCYCLE {}", bool_word(a.verify_cocycle())).unwrap();
        }
        Verb::Weight => {
            let f = expr_arg().expect("the parser requires an expression");
            match valid_action()?.weight_of(f).map_err(fail(&format!("({f})")))? {
                Some(k) => writeln!(out, "WEIGHT {k}").unwrap(),
                None => writeln!(out, "WEIGHT none").unwrap(),
            }
        }
        Verb::IsSlice => {
            let f = expr_arg().expect("the parser requires an expression");
            let b = valid_action()?.is_slice(f).map_err(fail(&format!("({f})")))?;
            writeln!(out, "ISSLICE {}", bool_word(b)).unwrap();
        }
    }
    Ok(Outcome { stdout: out, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::parse_session;

    fn go(src: &str) -> Outcome {
        run(&parse_session(src).unwrap()).unwrap()
    }

    #[test]
    fn detect_euler() {
        let o = go("vars x, y; der D { x -> 2*x; y -> 3*y; } cmd detect D");
        assert_eq!(o.stdout, "SEMISIMPLE order=16 action { x -> t^2*x; y -> t^3*y; }\nEIGEN x=2 y=3\n");
        assert_eq!(o.status.code(), 0);
    }

    #[test]
    fn translation_is_not_certified() {
        let o = go("vars x; der D { x -> 1 } cmd detect D");
        assert_eq!(o.stdout, "NOT_CERTIFIED order=16 generator=x\n");
        assert_eq!(o.status.code(), 2);
    }

    #[test]
    fn slice_of_coprime_weights() {
        let o = go("vars x, y; action A { x -> t^2*x; y -> t^3*y; } cmd slice A");
        assert_eq!(o.stdout, "SLICE y/x\n");
    }

    #[test]
    fn invalid_action_is_reported() {
        let src = "vars x; action A { x -> t^2*x + t - 1; } cmd weight A x";
        let e = run(&parse_session(src).unwrap()).unwrap_err();
        assert_eq!(e.to_string(), "1:46: weight: invalid action: `A` fails the action axioms");
        let v = go("vars x; action A { x -> t*x + t; } cmd verify A");
        assert_eq!(v.stdout, "IDENTITY false\nCOCYCLE false\n");
    }
}
