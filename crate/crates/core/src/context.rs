use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered list of variable names. Monomials are compared lexicographically
/// in declaration order, so the first variable is the most significant.
///
/// Two contexts are equal when they declare the same names in the same order.
#[derive(Clone)]
pub struct Context(Arc<Inner>);

struct Inner {
    vars: Vec<String>,
    // order in which factors of a monomial are printed
    display: Vec<usize>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Context {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Context(format!("`{v}` is not a valid variable name")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Context(format!("variable `{v}` declared twice")));
            }
        }
        let display = (0..vars.len()).collect();
        Ok(Context(Arc::new(Inner { vars, display })))
    }

    /// Appends variables after the existing ones. The new variables are
    /// printed first inside a monomial (`t^2*x` rather than `x*t^2`).
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut names: Vec<&str> = self.0.vars.iter().map(String::as_str).collect();
        names.extend(extra.iter().map(|s| s.as_ref()));
        let ctx = Context::new(&names)?;
        let n = self.nvars();
        let mut display: Vec<usize> = (n..n + extra.len()).collect();
        display.extend(self.0.display.iter().copied());
        Ok(Context(Arc::new(Inner { vars: ctx.0.vars.clone(), display })))
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.0.vars[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub(crate) fn display_order(&self) -> &[usize] {
        &self.0.display
    }

    pub(crate) fn check_same(&self, other: &Context) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Context(format!("mismatched variable contexts {self:?} and {other:?}")))
        }
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.vars == other.0.vars
    }
}

impl Eq for Context {}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.vars.join(", "))
    }
}
