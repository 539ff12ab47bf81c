use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Coarse classification of a C type, used for interface matching.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoarseType {
    IntLike,
    FloatLike,
    PointerOrArray,
    Void,
    Other(String),
}

const QUALIFIERS: &[&str] = &[
    "const", "volatile", "static", "extern", "register", "inline", "auto", "restrict",
];

const INT_WORDS: &[&str] = &[
    "int",
    "char",
    "short",
    "long",
    "signed",
    "unsigned",
    "_Bool",
    "bool",
    "size_t",
    "ssize_t",
    "ptrdiff_t",
    "int8_t",
    "int16_t",
    "int32_t",
    "int64_t",
    "uint8_t",
    "uint16_t",
    "uint32_t",
    "uint64_t",
    "intptr_t",
    "uintptr_t",
];

impl CoarseType {
    /// Total mapping from type text (as written in a declaration) to a coarse kind.
    pub fn classify(type_text: &str) -> CoarseType {
        if type_text.contains('*') || type_text.contains('[') {
            return CoarseType::PointerOrArray;
        }
        let words: Vec<&str> = type_text
            .split_whitespace()
            .filter(|w| !QUALIFIERS.contains(w))
            .collect();
        if words.is_empty() {
            return CoarseType::Other(String::new());
        }
        if words.iter().any(|w| *w == "float" || *w == "double") {
            CoarseType::FloatLike
        } else if words == ["void"] {
            CoarseType::Void
        } else if words.iter().all(|w| INT_WORDS.contains(w)) {
            CoarseType::IntLike
        } else {
            CoarseType::Other(words.join(" "))
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            CoarseType::IntLike => "int-like",
            CoarseType::FloatLike => "float-like",
            CoarseType::PointerOrArray => "pointer-or-array",
            CoarseType::Void => "void",
            CoarseType::Other(t) => t,
        }
    }
}

impl fmt::Display for CoarseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoarseType::Other(t) => write!(f, "other({t})"),
            _ => f.write_str(self.as_str()),
        }
    }
}

impl FromStr for CoarseType {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "int-like" => CoarseType::IntLike,
            "float-like" => CoarseType::FloatLike,
            "pointer-or-array" => CoarseType::PointerOrArray,
            "void" => CoarseType::Void,
            other => {
                let inner = other
                    .strip_prefix("other(")
                    .and_then(|s| s.strip_suffix(')'))
                    .unwrap_or(other);
                CoarseType::Other(inner.to_string())
            }
        })
    }
}

impl Serialize for CoarseType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoarseType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().unwrap_or_else(|e| match e {}))
    }
}
