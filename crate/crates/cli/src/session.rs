//! Session files: a variable declaration, named definitions and one command.
//!
//! ```text
//! vars x, y;
//! der D { x -> 2*x; y -> 3*y; }
//! map M { x -> x + y^2; y -> y; } inverse { x -> x - y^2; y -> y; }
//! action A { x -> t^2*x; y -> t^3*y; }
//! expr f { x^2/y }
//! cmd detect D --order 16 --dmax 7
//! ```
//!
//! Flags may also be written without dashes (`order 4`). Expressions inside
//! blocks and command arguments may refer to earlier `expr` definitions.

use std::fmt;

use gmact_core::expr::{Expr, Parser, Pos, Tok};
use gmact_core::{BirationalMap, Context, Derivation, Error, GmAction, RatFunc, EXT_VAR};

type Result<T> = gmact_core::Result<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Der,
    Action,
    Map,
    Expr,
}

impl Kind {
    fn keyword(self) -> &'static str {
        match self {
            Kind::Der => "der",
            Kind::Action => "action",
            Kind::Map => "map",
            Kind::Expr => "expr",
        }
    }

    fn described(self) -> &'static str {
        match self {
            Kind::Der => "a derivation",
            Kind::Action => "an action",
            Kind::Map => "a map",
            Kind::Expr => "an expression",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        [Kind::Der, Kind::Action, Kind::Map, Kind::Expr].into_iter().find(|k| k.keyword() == s)
    }
}

/// Actions are stored without checking the axioms so that `verify` can
/// report on invalid ones; every other verb checks them first.
#[derive(Debug, Clone)]
pub enum Value {
    Der(Derivation),
    Action(GmAction),
    Map(BirationalMap),
    Expr(RatFunc),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Der(_) => Kind::Der,
            Value::Action(_) => Kind::Action,
            Value::Map(_) => Kind::Map,
            Value::Expr(_) => Kind::Expr,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Definition {
    pub name: String,
    pub pos: Pos,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Exp,
    Detect,
    Extract,
    Slice,
    Conjugate,
    Verify,
    Weight,
    IsSlice,
}

/// What a verb accepts after its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArgShape {
    None,
    OptionalExpr,
    Expr,
    Map,
}

impl Verb {
    pub const ALL: [Verb; 8] = [
        Verb::Exp,
        Verb::Detect,
        Verb::Extract,
        Verb::Slice,
        Verb::Conjugate,
        Verb::Verify,
        Verb::Weight,
        Verb::IsSlice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::Exp => "exp",
            Verb::Detect => "detect",
            Verb::Extract => "extract",
            Verb::Slice => "slice",
            Verb::Conjugate => "conjugate",
            Verb::Verify => "verify",
            Verb::Weight => "weight",
            Verb::IsSlice => "isslice",
        }
    }

    fn targets(self) -> &'static [Kind] {
        match self {
            Verb::Exp | Verb::Detect => &[Kind::Der],
            Verb::Conjugate => &[Kind::Der, Kind::Action],
            _ => &[Kind::Action],
        }
    }

    fn shape(self) -> ArgShape {
        match self {
            Verb::Exp => ArgShape::OptionalExpr,
            Verb::Conjugate => ArgShape::Map,
            Verb::Weight | Verb::IsSlice => ArgShape::Expr,
            _ => ArgShape::None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Arg {
    Map(String),
    Expr(RatFunc),
}

#[derive(Debug, Clone)]
pub struct Command {
    pub verb: Verb,
    pub pos: Pos,
    pub target: String,
    pub arg: Option<Arg>,
    pub order: Option<usize>,
    pub dmax: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub ctx: Context,
    pub defs: Vec<Definition>,
    pub command: Command,
}

impl Session {
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.defs.iter().find(|d| d.name == name).map(|d| &d.value)
    }
}

pub fn parse_session(src: &str) -> Result<Session> {
    let mut p = SessionParser { p: Parser::from_source(src)?, ctx: None, defs: Vec::new() };
    p.session()
}

struct SessionParser {
    p: Parser,
    ctx: Option<Context>,
    defs: Vec<Definition>,
}

impl SessionParser {
    fn ctx(&self) -> &Context {
        self.ctx.as_ref().expect("variables are declared first")
    }

    fn keyword(&mut self, word: &str) -> Result<Pos> {
        let t = self.p.bump();
        match &t.tok {
            Tok::Ident(s) if s == word => Ok(t.pos),
            other => Err(t.pos.error(format!("expected `{word}`, found {other}"))),
        }
    }

    fn session(&mut self) -> Result<Session> {
        self.vars()?;
        loop {
            let t = self.p.peek().clone();
            match &t.tok {
                Tok::Ident(s) if s == "cmd" => break,
                Tok::Ident(s) => match Kind::from_keyword(s) {
                    Some(kind) => {
                        self.p.bump();
                        self.definition(kind)?;
                    }
                    None => {
                        return Err(t.pos.error(format!("expected a definition or `cmd`, found {}", t.tok)))
                    }
                },
                other => return Err(t.pos.error(format!("expected a definition or `cmd`, found {other}"))),
            }
        }
        let command = self.command()?;
        if !self.p.at_eof() {
            let t = self.p.peek();
            return Err(t.pos.error(format!("unexpected {} after the command", t.tok)));
        }
        Ok(Session { ctx: self.ctx().clone(), defs: std::mem::take(&mut self.defs), command })
    }

    fn vars(&mut self) -> Result<()> {
        self.keyword("vars")?;
        let mut names: Vec<String> = Vec::new();
        loop {
            let (name, pos) = self.p.expect_ident()?;
            if name == EXT_VAR {
                return Err(pos.error(format!("`{EXT_VAR}` is reserved for the group parameter")));
            }
            if names.contains(&name) {
                return Err(pos.error(format!("variable `{name}` declared twice")));
            }
            names.push(name);
            if !self.p.eat(&Tok::Comma) {
                break;
            }
        }
        self.p.expect(&Tok::Semi)?;
        self.ctx = Some(Context::new(&names)?);
        Ok(())
    }

    fn definition(&mut self, kind: Kind) -> Result<()> {
        let (name, pos) = self.p.expect_ident()?;
        if name == EXT_VAR || self.ctx().index_of(&name).is_some() {
            return Err(pos.error(format!("`{name}` is a variable and cannot name a definition")));
        }
        if self.defs.iter().any(|d| d.name == name) {
            return Err(pos.error(format!("`{name}` is already defined")));
        }
        let base = self.ctx().clone();
        let wrap = |e: Error| pos.error(format!("{} `{name}`: {e}", kind.keyword()));
        let value = match kind {
            Kind::Der => Value::Der(Derivation::new(&base, self.block(&base)?).map_err(wrap)?),
            Kind::Action => {
                let ext = GmAction::extended_context(&base)?;
                let images = self.block(&ext)?;
                Value::Action(GmAction::from_images_unchecked(&base, images).map_err(wrap)?)
            }
            Kind::Map => {
                let forward = self.block(&base)?;
                self.keyword("inverse")?;
                let inverse = self.block(&base)?;
                Value::Map(BirationalMap::new(&base, forward, inverse).map_err(wrap)?)
            }
            Kind::Expr => {
                self.p.expect(&Tok::LBrace)?;
                let e = self.p.parse_expr()?;
                let f = self.eval(&e, &base)?;
                self.p.eat(&Tok::Semi);
                self.p.expect(&Tok::RBrace)?;
                Value::Expr(f)
            }
        };
        self.defs.push(Definition { name, pos, value });
        Ok(())
    }

    /// `{ x -> e; y -> e; }` with one entry per declared variable, in any
    /// order. The last `;` may be omitted.
    fn block(&mut self, ctx: &Context) -> Result<Vec<RatFunc>> {
        let base = self.ctx().clone();
        self.p.expect(&Tok::LBrace)?;
        let mut images: Vec<Option<RatFunc>> = vec![None; base.nvars()];
        while self.p.peek().tok != Tok::RBrace {
            let (name, pos) = self.p.expect_ident()?;
            let i = base
                .index_of(&name)
                .ok_or_else(|| pos.error(format!("`{name}` is not a declared variable")))?;
            if images[i].is_some() {
                return Err(pos.error(format!("`{name}` is mapped twice")));
            }
            self.p.expect(&Tok::Arrow)?;
            let e = self.p.parse_expr()?;
            images[i] = Some(self.eval(&e, ctx)?);
            if !self.p.eat(&Tok::Semi) && self.p.peek().tok != Tok::RBrace {
                return Err(self.p.error_here(format!("expected `;`, found {}", self.p.peek().tok)));
            }
        }
        let close = self.p.expect(&Tok::RBrace)?;
        images
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.ok_or_else(|| close.error(format!("missing image for `{}`", base.var_name(i)))))
            .collect()
    }

    /// Like [`Expr::eval`], but names of `expr` definitions stand for their
    /// values.
    fn eval(&self, e: &Expr, ctx: &Context) -> Result<RatFunc> {
        Ok(match e {
            Expr::Int(n, _) => RatFunc::constant(ctx, n.clone().into()),
            Expr::Var(name, pos) => {
                if let Some(i) = ctx.index_of(name) {
                    RatFunc::var(ctx, i)
                } else {
                    match self.defs.iter().find(|d| &d.name == name) {
                        Some(Definition { value: Value::Expr(f), .. }) => f.embed(ctx)?,
                        Some(d) => {
                            return Err(pos.error(format!(
                                "`{name}` is {} and cannot be used in an expression",
                                d.value.kind().described()
                            )))
                        }
                        None if name == EXT_VAR => {
                            return Err(pos.error(format!("`{EXT_VAR}` may only appear in action blocks")))
                        }
                        None => return Err(pos.error(format!("undefined name `{name}`"))),
                    }
                }
            }
            Expr::Neg(a, _) => -&self.eval(a, ctx)?,
            Expr::Add(a, b, _) => &self.eval(a, ctx)? + &self.eval(b, ctx)?,
            Expr::Sub(a, b, _) => &self.eval(a, ctx)? - &self.eval(b, ctx)?,
            Expr::Mul(a, b, _) => &self.eval(a, ctx)? * &self.eval(b, ctx)?,
            Expr::Div(a, b, _) => {
                let num = self.eval(a, ctx)?;
                let den = self.eval(b, ctx)?;
                num.checked_div(&den).map_err(|_| b.pos().error("division by zero"))?
            }
            Expr::Pow(a, k, pos) => {
                self.eval(a, ctx)?.pow(*k).map_err(|_| pos.error("zero raised to a negative power"))?
            }
        })
    }

    fn command(&mut self) -> Result<Command> {
        self.keyword("cmd")?;
        let (word, pos) = self.p.expect_ident()?;
        let verb = Verb::ALL.into_iter().find(|v| v.name() == word).ok_or_else(|| {
            let names: Vec<_> = Verb::ALL.iter().map(|v| v.name()).collect();
            pos.error(format!("unknown command `{word}`; expected one of {}", names.join(", ")))
        })?;
        let (target, tpos) = self.p.expect_ident()?;
        let kind = self.kind_of(&target, tpos)?;
        if !verb.targets().contains(&kind) {
            let wanted: Vec<_> = verb.targets().iter().map(|k| k.described()).collect();
            return Err(tpos.error(format!(
                "`{}` expects {}, but `{target}` is {}",
                verb.name(),
                wanted.join(" or "),
                kind.described()
            )));
        }
        let arg = match verb.shape() {
            ArgShape::None => None,
            ArgShape::OptionalExpr if self.at_flag() => None,
            ArgShape::OptionalExpr | ArgShape::Expr => {
                let e = self.p.parse_expr()?;
                Some(Arg::Expr(self.eval(&e, &self.ctx().clone())?))
            }
            ArgShape::Map => {
                let (name, mpos) = self.p.expect_ident()?;
                if self.kind_of(&name, mpos)? != Kind::Map {
                    return Err(mpos.error(format!("`{name}` is not a map")));
                }
                Some(Arg::Map(name))
            }
        };
        let (mut order, mut dmax) = (None, None);
        while self.at_flag() {
            let t = self.p.bump();
            let name = match t.tok {
                Tok::Flag(s) | Tok::Ident(s) => s,
                _ => unreachable!("at_flag checked the token"),
            };
            let slot = if name == "order" { &mut order } else { &mut dmax };
            if slot.is_some() {
                return Err(t.pos.error(format!("`{name}` given twice")));
            }
            let (v, vpos) = self.p.expect_int()?;
            let v = usize::try_from(v).map_err(|_| vpos.error(format!("`{name}` must not be negative")))?;
            *slot = Some(v);
        }
        if let Tok::Flag(s) = &self.p.peek().tok {
            return Err(self.p.error_here(format!("unknown flag `--{s}`")));
        }
        Ok(Command { verb, pos, target, arg, order, dmax })
    }

    fn at_flag(&self) -> bool {
        match &self.p.peek().tok {
            Tok::Flag(s) => s == "order" || s == "dmax",
            Tok::Ident(s) => {
                (s == "order" || s == "dmax") && matches!(self.p.peek_nth(1).tok, Tok::Int(_) | Tok::Minus)
            }
            _ => false,
        }
    }

    fn kind_of(&self, name: &str, pos: Pos) -> Result<Kind> {
        self.defs
            .iter()
            .find(|d| d.name == name)
            .map(|d| d.value.kind())
            .ok_or_else(|| pos.error(format!("undefined name `{name}`")))
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, ctx: &Context, images: &[RatFunc]) -> fmt::Result {
    f.write_str("{")?;
    for (i, g) in images.iter().enumerate() {
        write!(f, " {} -> {g};", ctx.var_name(i))?;
    }
    f.write_str(" }")
}

/// Canonical text of a session; parsing it back yields the same session.
impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {};", self.ctx.vars().join(", "))?;
        for d in &self.defs {
            write!(f, "{} {} ", d.value.kind().keyword(), d.name)?;
            match &d.value {
                Value::Der(der) => write_block(f, &self.ctx, der.images())?,
                Value::Action(a) => write_block(f, &self.ctx, a.images())?,
                Value::Map(m) => {
                    write_block(f, &self.ctx, m.forward_images())?;
                    f.write_str(" inverse ")?;
                    write_block(f, &self.ctx, m.inverse_images())?;
                }
                Value::Expr(e) => write!(f, "{{ {e} }}")?,
            }
            writeln!(f)?;
        }
        let c = &self.command;
        write!(f, "cmd {} {}", c.verb.name(), c.target)?;
        match &c.arg {
            Some(Arg::Map(m)) => write!(f, " {m}")?,
            Some(Arg::Expr(e)) => write!(f, " ({e})")?,
            None => {}
        }
        if let Some(n) = c.order {
            write!(f, " --order {n}")?;
        }
        if let Some(d) = c.dmax {
            write!(f, " --dmax {d}")?;
        }
        writeln!(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(src: &str) -> String {
        parse_session(src).unwrap_err().to_string()
    }

    #[test]
    fn exp_with_bare_order() {
        let s = parse_session("vars x,y; der D { x -> 2*x; y -> 3*y; } cmd exp D order 4").unwrap();
        assert_eq!(s.defs.len(), 1);
        assert_eq!(s.command.verb, Verb::Exp);
        assert_eq!(s.command.order, Some(4));
        assert!(s.command.arg.is_none());
    }

    #[test]
    fn missing_image_expression() {
        assert_eq!(err("vars x;\nder D { x -> ; }\ncmd detect D"), "2:14: expected expression, found `;`");
    }

    #[test]
    fn name_errors() {
        assert_eq!(err("vars x, t; cmd detect D"), "1:9: `t` is reserved for the group parameter");
        assert_eq!(err("vars x; cmd detect D"), "1:20: undefined name `D`");
        assert_eq!(err("vars x; der D { x -> y; } cmd detect D"), "1:22: undefined name `y`");
        assert_eq!(
            err("vars x; der D { x -> t; } cmd detect D"),
            "1:22: `t` may only appear in action blocks"
        );
        assert_eq!(
            err("vars x; der D { x -> 1; } der D { x -> 2; } cmd detect D"),
            "1:31: `D` is already defined"
        );
        assert_eq!(err("vars x, y; der D { x -> 1; } cmd detect D"), "1:28: missing image for `y`");
    }

    #[test]
    fn wrong_target_kind() {
        assert_eq!(
            err("vars x; der D { x -> x; } cmd slice D"),
            "1:37: `slice` expects an action, but `D` is a derivation"
        );
    }

    #[test]
    fn expr_definitions_are_substituted() {
        let s =
            parse_session("vars x; expr f { x + 1 } action A { x -> t*f - t + 1 } cmd weight A f^2").unwrap();
        let Some(Arg::Expr(f)) = &s.command.arg else { panic!() };
        assert_eq!(f.to_string(), "x^2 + 2*x + 1");
        let again = parse_session(&s.to_string()).unwrap();
        assert_eq!(again.to_string(), s.to_string());
    }
}
