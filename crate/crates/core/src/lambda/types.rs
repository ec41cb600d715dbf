use std::collections::BTreeSet;
use std::fmt;

/// Simple types over named base types. `->` associates to the right.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Base(String),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn base(name: impl Into<String>) -> Type {
        Type::Base(name.into())
    }

    pub fn arrow(from: Type, to: Type) -> Type {
        Type::Arrow(Box::new(from), Box::new(to))
    }

    /// `a1 -> … -> an -> result`.
    pub fn arrows(args: Vec<Type>, result: Type) -> Type {
        args.into_iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a, acc))
    }

    /// Argument types and final result type.
    pub fn spine(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Arrow(a, b) = t {
            args.push(a.as_ref());
            t = b;
        }
        (args, t)
    }

    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Arrow(a, b) => Some((a, b)),
            Type::Base(_) => None,
        }
    }

    pub fn base_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_bases(&mut out);
        out
    }

    fn collect_bases<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Type::Base(n) => {
                out.insert(n);
            }
            Type::Arrow(a, b) => {
                a.collect_bases(out);
                b.collect_bases(out);
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base(n) => write!(f, "{n}"),
            Type::Arrow(a, b) => {
                if a.as_arrow().is_some() {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_right_associative() {
        let x = Type::base("X");
        let t = Type::arrow(
            Type::arrow(x.clone(), x.clone()),
            Type::arrow(x.clone(), x.clone()),
        );
        assert_eq!(t.to_string(), "(X -> X) -> X -> X");
        let (args, res) = t.spine();
        assert_eq!(args.len(), 2);
        assert_eq!(res, &x);
        assert_eq!(
            Type::arrows(vec![x.clone(), x.clone()], x.clone()).to_string(),
            "X -> X -> X"
        );
    }
}
