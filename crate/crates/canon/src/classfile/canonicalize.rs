//! Structural canonicalization: member ordering, debug-attribute
//! stripping, and opt-in annotation-array sorting. Instruction bytes are
//! never altered beyond pool-index relocation, and StackMapTable frames are
//! preserved verbatim.

use super::*;

#[derive(Clone, Copy, Debug)]
pub struct CanonicalizeOptions {
    /// Sort fields and methods by (name, descriptor) and InnerClasses
    /// entries by inner-class name.
    pub sort_members: bool,
    /// Remove SourceFile, SourceDebugExtension, LineNumberTable,
    /// LocalVariableTable, and LocalVariableTypeTable. Deprecated markers
    /// stay.
    pub strip_debug: bool,
    /// Sort array-typed annotation element values by canonical byte
    /// serialization. Off by default: element order can carry meaning for
    /// generated code, so reordering is opt-in.
    pub sort_annotation_arrays: bool,
}

impl Default for CanonicalizeOptions {
    fn default() -> Self {
        CanonicalizeOptions { sort_members: true, strip_debug: true, sort_annotation_arrays: false }
    }
}

fn is_debug_attribute(attr: &AttributeInfo) -> bool {
    matches!(
        attr,
        AttributeInfo::SourceFile(_)
            | AttributeInfo::SourceDebugExtension(_)
            | AttributeInfo::LineNumberTable(_)
            | AttributeInfo::LocalVariableTable(_)
            | AttributeInfo::LocalVariableTypeTable(_)
    )
}

fn strip_debug_attributes(attrs: &mut Vec<AttributeInfo>) {
    attrs.retain(|a| !is_debug_attribute(a));
    for attr in attrs {
        if let AttributeInfo::Code(code) = attr {
            strip_debug_attributes(&mut code.attributes);
        }
    }
}

/// Canonical byte rendering of an element value, used as the sort key for
/// annotation arrays. Pool-independent, so equal values compare equal
/// regardless of origin.
fn element_value_key(v: &ElementValue) -> Vec<u8> {
    let mut out = Vec::new();
    encode_element_value(v, &mut out);
    out
}

fn encode_element_value(v: &ElementValue, out: &mut Vec<u8>) {
    match v {
        ElementValue::Const { tag, value } => {
            out.push(*tag);
            out.extend_from_slice(format!("{value:?}").as_bytes());
        }
        ElementValue::EnumConst { type_name, const_name } => {
            out.push(b'e');
            out.extend_from_slice(type_name);
            out.push(0);
            out.extend_from_slice(const_name);
        }
        ElementValue::ClassInfo(c) => {
            out.push(b'c');
            out.extend_from_slice(c);
        }
        ElementValue::Nested(a) => {
            out.push(b'@');
            out.extend_from_slice(&a.type_descriptor);
            for (name, value) in &a.elements {
                out.push(0);
                out.extend_from_slice(name);
                encode_element_value(value, out);
            }
        }
        ElementValue::Array(items) => {
            out.push(b'[');
            for item in items {
                encode_element_value(item, out);
                out.push(0);
            }
        }
    }
}

fn sort_annotation_arrays_in(value: &mut ElementValue) {
    match value {
        ElementValue::Array(items) => {
            for item in items.iter_mut() {
                sort_annotation_arrays_in(item);
            }
            items.sort_by_key(element_value_key);
        }
        ElementValue::Nested(a) => {
            for (_, v) in a.elements.iter_mut() {
                sort_annotation_arrays_in(v);
            }
        }
        _ => {}
    }
}

fn visit_annotations(attrs: &mut [AttributeInfo]) {
    for attr in attrs {
        match attr {
            AttributeInfo::Annotations { annotations, .. } => {
                for a in annotations {
                    for (_, v) in a.elements.iter_mut() {
                        sort_annotation_arrays_in(v);
                    }
                }
            }
            AttributeInfo::ParameterAnnotations { parameters, .. } => {
                for p in parameters {
                    for a in p {
                        for (_, v) in a.elements.iter_mut() {
                            sort_annotation_arrays_in(v);
                        }
                    }
                }
            }
            AttributeInfo::AnnotationDefault(v) => sort_annotation_arrays_in(v),
            AttributeInfo::Code(code) => visit_annotations(&mut code.attributes),
            _ => {}
        }
    }
}

/// Canonicalize classfile structure. Fails with
/// [`ClassfileError::Unrelocatable`] when an unknown attribute carries
/// payload bytes whose pool references cannot be rewritten; the caller
/// leaves the entry untouched and flags it.
pub fn canonicalize_classfile(cf: &ClassFile, options: &CanonicalizeOptions) -> Result<ClassFile, ClassfileError> {
    cf.relocatable()?;
    let mut out = cf.clone();

    if options.strip_debug {
        strip_debug_attributes(&mut out.attributes);
        for member in out.fields.iter_mut().chain(out.methods.iter_mut()) {
            strip_debug_attributes(&mut member.attributes);
        }
    }

    if options.sort_members {
        // <clinit> is unique per class, so plain name ordering also fixes
        // static-initializer placement.
        out.fields.sort_by(|a, b| (&a.name, &a.descriptor).cmp(&(&b.name, &b.descriptor)));
        out.methods.sort_by(|a, b| (&a.name, &a.descriptor).cmp(&(&b.name, &b.descriptor)));
        for attr in out.attributes.iter_mut() {
            if let AttributeInfo::InnerClasses(entries) = attr {
                entries.sort_by(|a, b| a.inner.cmp(&b.inner));
            }
        }
    }

    if options.sort_annotation_arrays {
        visit_annotations(&mut out.attributes);
        for member in out.fields.iter_mut().chain(out.methods.iter_mut()) {
            visit_annotations(&mut member.attributes);
        }
    }

    Ok(out)
}
