use std::fmt;

use serde::{Deserialize, Serialize};

/// Canonical vertex name.
///
/// Input complexes use atoms. Each barycentric subdivision wraps the simplex a
/// new vertex stands for into a sorted `Set`, so the nesting depth records the
/// number of subdivisions. The derived order (atoms before sets, sets compared
/// lexicographically element by element) is the canonical vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexName {
    Atom(String),
    Set(Vec<VertexName>),
}

impl VertexName {
    pub fn atom(s: impl Into<String>) -> Self {
        VertexName::Atom(s.into())
    }

    /// Name of the barycenter of the simplex with the given vertices.
    pub fn set<I: IntoIterator<Item = VertexName>>(members: I) -> Self {
        let mut v: Vec<VertexName> = members.into_iter().collect();
        v.sort();
        v.dedup();
        VertexName::Set(v)
    }

    pub fn members(&self) -> Option<&[VertexName]> {
        match self {
            VertexName::Set(v) => Some(v),
            VertexName::Atom(_) => None,
        }
    }

    /// Number of subdivision layers wrapped around the innermost atoms.
    pub fn depth(&self) -> usize {
        match self {
            VertexName::Atom(_) => 0,
            VertexName::Set(v) => 1 + v.iter().map(VertexName::depth).max().unwrap_or(0),
        }
    }

    /// Encoding used for JSON object keys: atoms verbatim, sets as compact JSON.
    pub fn to_key(&self) -> String {
        match self {
            VertexName::Atom(s) => s.clone(),
            VertexName::Set(_) => serde_json::to_string(self).expect("names serialize"),
        }
    }

    pub fn from_key(key: &str) -> Result<Self, serde_json::Error> {
        if key.starts_with('[') {
            serde_json::from_str(key)
        } else {
            Ok(VertexName::Atom(key.to_string()))
        }
    }
}

impl fmt::Display for VertexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexName::Atom(s) => f.write_str(s),
            VertexName::Set(v) => {
                f.write_str("[")?;
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl From<&str> for VertexName {
    fn from(s: &str) -> Self {
        VertexName::Atom(s.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_names_sort_and_nest() {
        let n = VertexName::set(["b".into(), "a".into()]);
        assert_eq!(n.to_string(), "[a,b]");
        assert_eq!(n.depth(), 1);
        let nn = VertexName::set([n.clone()]);
        assert_eq!(nn.depth(), 2);
        assert!(VertexName::atom("z") < n);
    }

    #[test]
    fn key_round_trip() {
        let n = VertexName::set([VertexName::set(["a".into()]), VertexName::set(["a".into(), "b".into()])]);
        assert_eq!(VertexName::from_key(&n.to_key()).unwrap(), n);
        assert_eq!(VertexName::from_key("u").unwrap(), VertexName::atom("u"));
    }

    #[test]
    fn json_shape() {
        let n = VertexName::set(["a".into()]);
        assert_eq!(serde_json::to_string(&n).unwrap(), r#"["a"]"#);
        let back: VertexName = serde_json::from_str(r#"[["a"],"b"]"#).unwrap();
        assert_eq!(back.depth(), 2);
    }
}
