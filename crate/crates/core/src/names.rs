//! Identifier and URI helpers shared by every model layer.

/// Returns true when `s` is a valid XML NCName (ASCII letters, digits,
/// `_`, `-`, `.`, and any non-ASCII letter; must not start with a digit,
/// `-` or `.`; no colon).
pub fn is_ncname(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first == '_' || first.is_alphabetic()) {
        return false;
    }
    chars.all(|c| c == '_' || c == '-' || c == '.' || c.is_alphanumeric())
}

/// Returns true when `s` parses as an absolute URI (has a scheme).
pub fn is_absolute_uri(s: &str) -> bool {
    !s.is_empty() && s.trim() == s && url::Url::parse(s).is_ok()
}

/// Upper-cases the first character, leaving the rest untouched.
pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Lower-cases the first character, leaving the rest untouched.
pub fn decapitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Strips an optional `prefix:` from a QName-valued attribute.
pub fn local_part(qname: &str) -> &str {
    qname.rsplit_once(':').map_or(qname, |(_, local)| local)
}

/// XML Schema built-in datatypes accepted as simple base types and as
/// complex-type field types.
pub const XSD_BUILTINS: &[&str] = &[
    "anyURI",
    "base64Binary",
    "boolean",
    "byte",
    "date",
    "dateTime",
    "decimal",
    "double",
    "duration",
    "float",
    "hexBinary",
    "int",
    "integer",
    "language",
    "long",
    "negativeInteger",
    "nonNegativeInteger",
    "nonPositiveInteger",
    "normalizedString",
    "positiveInteger",
    "QName",
    "short",
    "string",
    "time",
    "token",
    "unsignedByte",
    "unsignedInt",
    "unsignedLong",
    "unsignedShort",
];

pub fn is_xsd_builtin(name: &str) -> bool {
    XSD_BUILTINS.contains(&name)
}

const INTEGER_BUILTINS: &[&str] = &[
    "byte",
    "int",
    "integer",
    "long",
    "negativeInteger",
    "nonNegativeInteger",
    "nonPositiveInteger",
    "positiveInteger",
    "short",
    "unsignedByte",
    "unsignedInt",
    "unsignedLong",
    "unsignedShort",
];

/// The literal kind a built-in carries at run time: `integer`, `boolean`
/// or `text` (everything else, decimals included, travels as text).
pub fn literal_kind(builtin: &str) -> &'static str {
    if INTEGER_BUILTINS.contains(&builtin) {
        "integer"
    } else if builtin == "boolean" {
        "boolean"
    } else {
        "text"
    }
}
