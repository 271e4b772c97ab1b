//! Reading subjects, contexts and signatures, with failures mapped to exit
//! code 2.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use mlf_kernel::surface::{parse_arity_context, parse_expr, parse_type_context, ParseError};
use mlf_kernel::{arity_translate_entries, ArityContext, Expr, Kind, Name, Signature, SignatureError};
use serde_json::json;

use crate::{Report, Subject};

pub const PARSE_ERROR: u8 = 2;

/// A failure before any judgement was attempted.
pub struct InputError {
    pub message: String,
    pub detail: serde_json::Value,
}

impl InputError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        InputError {
            message: format!("{}: {e}", path.display()),
            detail: json!({ "kind": "io", "path": path.display().to_string(), "message": e.to_string() }),
        }
    }

    fn parse(e: ParseError, file: Option<&str>) -> Self {
        let mut e = e;
        if let (None, Some(f)) = (&e.span.file, file) {
            e.span.file = Some(Arc::from(f));
        }
        InputError {
            message: format!("parse error: {e}"),
            detail: json!({
                "kind": "parse",
                "file": e.span.file.as_deref(),
                "line": e.span.line,
                "columns": [e.span.col_start, e.span.col_end],
                "message": e.message,
            }),
        }
    }

    fn signature(e: SignatureError) -> Self {
        match e {
            SignatureError::Parse(p) => InputError::parse(p, None),
            other => InputError {
                message: format!("signature: {other}"),
                detail: json!({ "kind": "signature", "message": other.to_string() }),
            },
        }
    }

    pub fn report(self, command: &str) -> Report {
        Report {
            code: PARSE_ERROR,
            json: json!({ "command": command, "status": "error", "error": self.detail }),
            text: String::new(),
            diag: format!("error: {}\n", self.message),
        }
    }
}

pub struct Source {
    pub text: String,
    /// File name for diagnostics.
    pub name: Option<String>,
}

pub fn read(path: &Path) -> Result<Source, InputError> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| InputError::io(path, e))?
    } else {
        std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?
    };
    Ok(Source {
        text,
        name: Some(path.display().to_string()),
    })
}

pub fn subject_source(s: &Subject) -> Result<Source, InputError> {
    match (&s.expr, &s.file) {
        (Some(e), _) => Ok(Source {
            text: e.clone(),
            name: None,
        }),
        (None, Some(f)) => read(f),
        (None, None) => Err(InputError {
            message: "no subject: give a FILE or --expr".into(),
            detail: json!({ "kind": "usage", "message": "no subject: give a FILE or --expr" }),
        }),
    }
}

/// Merges the requested signatures. Accepts `sig:<builtin>`, `sig:all`, a
/// bare builtin name when no file of that name exists, or a file path.
pub fn signature(specs: &[String]) -> Result<Signature, InputError> {
    let mut sig = Signature::empty();
    for spec in specs {
        let bare = spec.strip_prefix("sig:").or_else(|| {
            (!Path::new(spec).exists() && ["sigma", "bool", "universe", "all"].contains(&spec.as_str()))
                .then_some(spec.as_str())
        });
        let next = match bare {
            Some("all") => Signature::builtins(),
            Some(b) => Signature::builtin(b).map_err(InputError::signature)?,
            None => Signature::load(&PathBuf::from(spec)).map_err(InputError::signature)?,
        };
        sig.merge(&next).map_err(InputError::signature)?;
    }
    Ok(sig)
}

pub fn expr(src: &Source, sig: &Signature) -> Result<Expr, InputError> {
    parse_expr(&src.text, sig).map_err(|e| InputError::parse(e, src.name.as_deref()))
}

pub fn is_typed_context(text: &str) -> bool {
    text.lines()
        .map(|l| l.split("--").next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with("assume"))
}

pub fn type_context(src: &Source, sig: &Signature) -> Result<Vec<(Name, Kind)>, InputError> {
    parse_type_context(&src.text, sig).map_err(|e| InputError::parse(e, src.name.as_deref()))
}

/// An arity context, translating a typed context if that is what the file
/// holds.
pub fn arity_context(src: &Source, sig: &Signature) -> Result<ArityContext, InputError> {
    if !is_typed_context(&src.text) {
        return parse_arity_context(&src.text).map_err(|e| InputError::parse(e, src.name.as_deref()));
    }
    let entries = type_context(src, sig)?;
    arity_translate_entries(&entries).map_err(|e| InputError {
        message: e.to_string(),
        detail: json!({ "kind": "parse", "message": e.to_string() }),
    })
}
