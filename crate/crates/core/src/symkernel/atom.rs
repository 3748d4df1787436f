use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::expr::Expr;

/// Name of the metric signature symbol.
pub const EPS: &str = "eps";
/// Name of the dependent variable.
pub const DEPENDENT: &str = "u";

/// Independent coordinate of the flat 3-space.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indep {
    T,
    X,
    Y,
}

impl Indep {
    pub const ALL: [Indep; 3] = [Indep::T, Indep::X, Indep::Y];

    pub fn name(self) -> &'static str {
        match self {
            Indep::T => "t",
            Indep::X => "x",
            Indep::Y => "y",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Indep::T => 't',
            Indep::X => 'x',
            Indep::Y => 'y',
        }
    }

    pub fn from_letter(c: char) -> Option<Indep> {
        match c {
            't' => Some(Indep::T),
            'x' => Some(Indep::X),
            'y' => Some(Indep::Y),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> Atom {
        Atom::sym(self.name())
    }
}

/// Highest jet order the engine will produce.
pub const MAX_JET_ORDER: usize = 3;

/// Jet coordinate `u_J`: a formal partial derivative of the dependent variable.
///
/// The multi-index is stored sorted, so `u_tx` and `u_xt` are the same value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    index: SmallVec<[Indep; 3]>,
}

impl JetVar {
    pub fn new(indices: &[Indep]) -> JetVar {
        let mut index: SmallVec<[Indep; 3]> = indices.iter().copied().collect();
        index.sort();
        JetVar { index }
    }

    /// The dependent variable itself (order 0).
    pub fn base() -> JetVar {
        JetVar { index: SmallVec::new() }
    }

    pub fn order(&self) -> usize {
        self.index.len()
    }

    pub fn indices(&self) -> &[Indep] {
        &self.index
    }

    pub fn count(&self, v: Indep) -> usize {
        self.index.iter().filter(|&&i| i == v).count()
    }

    /// `u_J` differentiated once more by `v`.
    pub fn extend(&self, v: Indep) -> JetVar {
        let mut index = self.index.clone();
        index.push(v);
        index.sort();
        JetVar { index }
    }

    /// Removes one occurrence of `v`, if present.
    pub fn drop_one(&self, v: Indep) -> Option<JetVar> {
        let pos = self.index.iter().position(|&i| i == v)?;
        let mut index = self.index.clone();
        index.remove(pos);
        Some(JetVar { index })
    }

    /// Parses the suffix after `u_`, in any letter order.
    pub fn from_suffix(s: &str) -> Option<JetVar> {
        let idx: Option<Vec<Indep>> = s.chars().map(Indep::from_letter).collect();
        let idx = idx?;
        if idx.is_empty() {
            return None;
        }
        Some(JetVar::new(&idx))
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(DEPENDENT)?;
        if !self.index.is_empty() {
            f.write_str("_")?;
            for i in &self.index {
                write!(f, "{}", i.letter())?;
            }
        }
        Ok(())
    }
}

/// Elementary functions kept as opaque atoms with known derivatives.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElemKind {
    Exp,
    Arctan,
    Sqrt,
}

impl ElemKind {
    pub fn name(self) -> &'static str {
        match self {
            ElemKind::Exp => "exp",
            ElemKind::Arctan => "arctan",
            ElemKind::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<ElemKind> {
        match s {
            "exp" => Some(ElemKind::Exp),
            "arctan" => Some(ElemKind::Arctan),
            "sqrt" => Some(ElemKind::Sqrt),
            _ => None,
        }
    }
}

/// Application of an abstract function, e.g. `V[1,0](x/t, y/t)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: Arc<str>,
    /// Derivative order per argument slot.
    pub derivs: Vec<u32>,
    pub args: Vec<Expr>,
}

impl FuncApp {
    /// Same function and arguments with one more derivative in `slot`.
    pub fn raised(&self, slot: usize) -> FuncApp {
        let mut derivs = self.derivs.clone();
        derivs[slot] += 1;
        FuncApp {
            name: self.name.clone(),
            derivs,
            args: self.args.clone(),
        }
    }

    pub fn is_underived(&self) -> bool {
        self.derivs.iter().all(|&d| d == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemApp {
    pub kind: ElemKind,
    pub arg: Expr,
}

/// Indeterminate of the polynomial ring underlying [`Expr`].
///
/// Ordering is structural, so it does not depend on construction history.
/// Symbols sort first and therefore lead in the lexicographic term order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Arc<str>),
    Jet(JetVar),
    Func(Arc<FuncApp>),
    Elem(Arc<ElemApp>),
}

impl Atom {
    pub fn sym(name: &str) -> Atom {
        Atom::Sym(Arc::from(name))
    }

    pub fn eps() -> Atom {
        Atom::sym(EPS)
    }

    pub fn jet(j: JetVar) -> Atom {
        Atom::Jet(j)
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Atom::Sym(s) if &**s == EPS)
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Atom::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self {
            Atom::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_func(&self) -> Option<&FuncApp> {
        match self {
            Atom::Func(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_sqrt_arg(&self) -> Option<&Expr> {
        match self {
            Atom::Elem(e) if e.kind == ElemKind::Sqrt => Some(&e.arg),
            _ => None,
        }
    }

    /// Expressions nested inside this atom.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Atom::Sym(_) | Atom::Jet(_) => Vec::new(),
            Atom::Func(f) => f.args.iter().collect(),
            Atom::Elem(e) => vec![&e.arg],
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sym(s) => f.write_str(s),
            Atom::Jet(j) => write!(f, "{j}"),
            Atom::Func(app) => {
                f.write_str(&app.name)?;
                if !app.is_underived() {
                    f.write_str("[")?;
                    for (i, d) in app.derivs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{d}")?;
                    }
                    f.write_str("]")?;
                }
                f.write_str("(")?;
                for (i, a) in app.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Atom::Elem(e) => write!(f, "{}({})", e.kind.name(), e.arg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_index_is_order_independent() {
        assert_eq!(JetVar::from_suffix("tx"), JetVar::from_suffix("xt"));
        assert_eq!(JetVar::from_suffix("yxt").unwrap().to_string(), "u_txy");
        assert_eq!(JetVar::from_suffix("q"), None);
    }

    #[test]
    fn jet_extend_and_drop() {
        let j = JetVar::new(&[Indep::X]).extend(Indep::T);
        assert_eq!(j.to_string(), "u_tx");
        assert_eq!(j.count(Indep::T), 1);
        assert_eq!(j.drop_one(Indep::X).unwrap().to_string(), "u_t");
        assert!(j.drop_one(Indep::Y).is_none());
    }
}
