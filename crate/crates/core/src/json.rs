//! JSON emission with fixed 17-significant-digit floats.
//!
//! `serde_json` writes the shortest round-tripping decimal by default. Corpus
//! and model files instead pin every float to `{:.16e}` so the text form is
//! independent of the formatting algorithm and always carries 17 digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

#[derive(Default)]
pub(crate) struct FullPrecision<F> {
    inner: F,
}

fn write_float<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
    if value.is_finite() {
        write!(writer, "{value:.16e}")
    } else {
        // JSON has no representation for these; validation rejects them before writing.
        writer.write_all(b"null")
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*));* $(;)?) => {
        $(
            #[inline]
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl<F: Formatter> Formatter for FullPrecision<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write_float(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write_float(writer, f64::from(value))
    }

    delegate! {
        begin_array(); end_array();
        begin_array_value(first: bool); end_array_value();
        begin_object(); end_object();
        begin_object_key(first: bool); end_object_key();
        begin_object_value(); end_object_value();
    }
}

/// Serializes `value` as a single compact line with full-precision floats.
pub(crate) fn to_line<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        FullPrecision {
            inner: CompactFormatter,
        },
    );
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Serializes `value` as indented JSON with full-precision floats.
pub(crate) fn to_pretty<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        FullPrecision {
            inner: PrettyFormatter::new(),
        },
    );
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
