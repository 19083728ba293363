//! Structured JVM classfiles supporting canonical reserialization.
//!
//! Parsing resolves every constant-pool reference to symbolic form, so the
//! pool itself carries no information; writing rebuilds it in deterministic
//! first-use order. Bytecode is kept verbatim with a relocation table for
//! the pool operands embedded in instructions.

mod canonicalize;
mod parse;
mod write;

pub use canonicalize::{canonicalize_classfile, CanonicalizeOptions};
pub use parse::parse_classfile;
pub use write::write_classfile;

use thiserror::Error;

/// Raw modified-UTF-8 bytes as stored in the pool; kept uninterpreted so
/// surrogate-encoded names survive round trips.
pub type MUtf8 = Vec<u8>;

#[derive(Debug, Error)]
pub enum ClassfileError {
    /// The entry is compared as opaque bytes instead.
    #[error("malformed classfile: {0}")]
    Malformed(String),
    /// An unknown attribute holds data whose pool references cannot be
    /// rewritten safely; the classfile is left uncanonicalized and flagged.
    #[error("unrelocatable attribute: {0}")]
    Unrelocatable(String),
    /// More than 65534 constants; the entry is compared opaque.
    #[error("constant pool overflow")]
    PoolOverflow,
}

/// A symbolic constant. `Dynamic`/`InvokeDynamic` keep their numeric
/// bootstrap-method index: it points into the `BootstrapMethods` attribute,
/// not the pool.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Utf8(MUtf8),
    Integer(i32),
    /// Raw IEEE-754 bits, so NaN payloads round-trip exactly.
    Float(u32),
    Long(i64),
    /// Raw IEEE-754 bits.
    Double(u64),
    Class(MUtf8),
    Str(MUtf8),
    FieldRef { class: MUtf8, name: MUtf8, descriptor: MUtf8 },
    MethodRef { class: MUtf8, name: MUtf8, descriptor: MUtf8 },
    InterfaceMethodRef { class: MUtf8, name: MUtf8, descriptor: MUtf8 },
    NameAndType { name: MUtf8, descriptor: MUtf8 },
    MethodHandle { kind: u8, reference: Box<Const> },
    MethodType(MUtf8),
    Dynamic { bootstrap: u16, name: MUtf8, descriptor: MUtf8 },
    InvokeDynamic { bootstrap: u16, name: MUtf8, descriptor: MUtf8 },
    Module(MUtf8),
    Package(MUtf8),
}

/// A pool operand embedded in bytecode: where it sits and what it names.
/// Narrow references come from `ldc` and must relocate to indices <= 255.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeRef {
    pub offset: usize,
    pub narrow: bool,
    pub constant: Const,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionHandler {
    pub start_pc: u16,
    pub end_pc: u16,
    pub handler_pc: u16,
    /// `None` is the catch-all used by `finally`.
    pub catch_type: Option<MUtf8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeAttribute {
    pub max_stack: u16,
    pub max_locals: u16,
    /// Instruction bytes with pool operand positions masked to zero, so the
    /// stored code is independent of pool layout; `pool_refs` carries the
    /// symbolic operands and reserialization patches them back in.
    pub code: Vec<u8>,
    pub pool_refs: Vec<CodeRef>,
    pub exception_table: Vec<ExceptionHandler>,
    pub attributes: Vec<AttributeInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerClassEntry {
    pub inner: Option<MUtf8>,
    pub outer: Option<MUtf8>,
    pub inner_name: Option<MUtf8>,
    pub access_flags: u16,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalVariable {
    pub start_pc: u16,
    pub length: u16,
    pub name: MUtf8,
    pub descriptor: MUtf8,
    pub index: u16,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub type_descriptor: MUtf8,
    pub elements: Vec<(MUtf8, ElementValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementValue {
    /// Primitive or string constant; the tag distinguishes B/C/I/S/Z which
    /// all store Integer pool entries.
    Const { tag: u8, value: Const },
    EnumConst { type_name: MUtf8, const_name: MUtf8 },
    ClassInfo(MUtf8),
    Nested(Annotation),
    Array(Vec<ElementValue>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BootstrapMethod {
    pub method: Const,
    pub arguments: Vec<Const>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerificationType {
    Top,
    Integer,
    Float,
    Double,
    Long,
    Null,
    UninitializedThis,
    Object(MUtf8),
    Uninitialized(u16),
}

/// StackMapTable frames, preserved verbatim apart from pool relocation of
/// `Object` entries; never regenerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StackMapFrame {
    Same(u8),
    SameLocals1(u8, VerificationType),
    SameLocals1Extended(u16, VerificationType),
    Chop(u8, u16),
    SameExtended(u16),
    Append(u8, u16, Vec<VerificationType>),
    Full { offset_delta: u16, locals: Vec<VerificationType>, stack: Vec<VerificationType> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttributeInfo {
    Code(CodeAttribute),
    ConstantValue(Const),
    Exceptions(Vec<MUtf8>),
    InnerClasses(Vec<InnerClassEntry>),
    EnclosingMethod { class: MUtf8, method: Option<(MUtf8, MUtf8)> },
    Synthetic,
    Signature(MUtf8),
    SourceFile(MUtf8),
    SourceDebugExtension(Vec<u8>),
    LineNumberTable(Vec<(u16, u16)>),
    LocalVariableTable(Vec<LocalVariable>),
    LocalVariableTypeTable(Vec<LocalVariable>),
    Deprecated,
    Annotations { visible: bool, annotations: Vec<Annotation> },
    ParameterAnnotations { visible: bool, parameters: Vec<Vec<Annotation>> },
    AnnotationDefault(ElementValue),
    BootstrapMethods(Vec<BootstrapMethod>),
    MethodParameters(Vec<(Option<MUtf8>, u16)>),
    NestHost(MUtf8),
    NestMembers(Vec<MUtf8>),
    PermittedSubclasses(Vec<MUtf8>),
    StackMapTable(Vec<StackMapFrame>),
    /// Preserved opaque. Only the attribute-name pool index is relocated;
    /// any payload bytes may hide pool indices we cannot rewrite, so
    /// non-empty unknown attributes block canonical reserialization.
    Unknown { name: MUtf8, data: Vec<u8> },
}

impl AttributeInfo {
    pub fn name(&self) -> &[u8] {
        match self {
            AttributeInfo::Code(_) => b"Code",
            AttributeInfo::ConstantValue(_) => b"ConstantValue",
            AttributeInfo::Exceptions(_) => b"Exceptions",
            AttributeInfo::InnerClasses(_) => b"InnerClasses",
            AttributeInfo::EnclosingMethod { .. } => b"EnclosingMethod",
            AttributeInfo::Synthetic => b"Synthetic",
            AttributeInfo::Signature(_) => b"Signature",
            AttributeInfo::SourceFile(_) => b"SourceFile",
            AttributeInfo::SourceDebugExtension(_) => b"SourceDebugExtension",
            AttributeInfo::LineNumberTable(_) => b"LineNumberTable",
            AttributeInfo::LocalVariableTable(_) => b"LocalVariableTable",
            AttributeInfo::LocalVariableTypeTable(_) => b"LocalVariableTypeTable",
            AttributeInfo::Deprecated => b"Deprecated",
            AttributeInfo::Annotations { visible: true, .. } => b"RuntimeVisibleAnnotations",
            AttributeInfo::Annotations { visible: false, .. } => b"RuntimeInvisibleAnnotations",
            AttributeInfo::ParameterAnnotations { visible: true, .. } => b"RuntimeVisibleParameterAnnotations",
            AttributeInfo::ParameterAnnotations { visible: false, .. } => b"RuntimeInvisibleParameterAnnotations",
            AttributeInfo::AnnotationDefault(_) => b"AnnotationDefault",
            AttributeInfo::BootstrapMethods(_) => b"BootstrapMethods",
            AttributeInfo::MethodParameters(_) => b"MethodParameters",
            AttributeInfo::NestHost(_) => b"NestHost",
            AttributeInfo::NestMembers(_) => b"NestMembers",
            AttributeInfo::PermittedSubclasses(_) => b"PermittedSubclasses",
            AttributeInfo::StackMapTable(_) => b"StackMapTable",
            AttributeInfo::Unknown { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberInfo {
    pub access_flags: u16,
    pub name: MUtf8,
    pub descriptor: MUtf8,
    pub attributes: Vec<AttributeInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFile {
    pub minor_version: u16,
    pub major_version: u16,
    pub access_flags: u16,
    pub this_class: MUtf8,
    /// `None` only for `java/lang/Object` and module descriptors.
    pub super_class: Option<MUtf8>,
    pub interfaces: Vec<MUtf8>,
    pub fields: Vec<MemberInfo>,
    pub methods: Vec<MemberInfo>,
    pub attributes: Vec<AttributeInfo>,
}

impl ClassFile {
    /// Whether canonical reserialization is possible: no unknown attribute
    /// anywhere carries payload bytes.
    pub fn relocatable(&self) -> Result<(), ClassfileError> {
        fn check(attrs: &[AttributeInfo]) -> Result<(), ClassfileError> {
            for attr in attrs {
                match attr {
                    AttributeInfo::Unknown { name, data } if !data.is_empty() => {
                        return Err(ClassfileError::Unrelocatable(String::from_utf8_lossy(name).into_owned()));
                    }
                    AttributeInfo::Code(code) => check(&code.attributes)?,
                    _ => {}
                }
            }
            Ok(())
        }
        check(&self.attributes)?;
        for member in self.fields.iter().chain(&self.methods) {
            check(&member.attributes)?;
        }
        Ok(())
    }
}

fn lossy(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn describe_attributes(out: &mut String, indent: &str, attrs: &[AttributeInfo]) {
    use std::fmt::Write;
    for attr in attrs {
        match attr {
            AttributeInfo::Code(code) => {
                let _ = writeln!(
                    out,
                    "{indent}Code: stack={} locals={} bytes={}",
                    code.max_stack,
                    code.max_locals,
                    code.code.len()
                );
                let _ = writeln!(out, "{indent}  instructions: {}", hex::encode(&code.code));
                for r in &code.pool_refs {
                    let _ = writeln!(out, "{indent}  @{} -> {:?}", r.offset, r.constant);
                }
                for h in &code.exception_table {
                    let _ = writeln!(
                        out,
                        "{indent}  handler {}..{} -> {} catch {}",
                        h.start_pc,
                        h.end_pc,
                        h.handler_pc,
                        h.catch_type.as_deref().map(lossy).unwrap_or_else(|| "any".into())
                    );
                }
                describe_attributes(out, &format!("{indent}  "), &code.attributes);
            }
            AttributeInfo::LineNumberTable(entries) => {
                // Each row names its attribute so one added row is
                // attributable in a diff without its context lines.
                for (pc, line) in entries {
                    let _ = writeln!(out, "{indent}LineNumberTable line {line}: pc {pc}");
                }
            }
            AttributeInfo::LocalVariableTable(vars) | AttributeInfo::LocalVariableTypeTable(vars) => {
                for v in vars {
                    let _ = writeln!(out, "{indent}{} {} {} slot {}", lossy(attr.name()), lossy(&v.name), lossy(&v.descriptor), v.index);
                }
            }
            AttributeInfo::SourceFile(name) => {
                let _ = writeln!(out, "{indent}SourceFile: {}", lossy(name));
            }
            AttributeInfo::InnerClasses(entries) => {
                let _ = writeln!(out, "{indent}InnerClasses:");
                for e in entries {
                    let _ = writeln!(out, "{indent}  {}", e.inner.as_deref().map(lossy).unwrap_or_default());
                }
            }
            AttributeInfo::Unknown { name, data } => {
                let _ = writeln!(out, "{indent}{} ({} bytes, opaque)", lossy(name), data.len());
            }
            other => {
                let _ = writeln!(out, "{indent}{}", lossy(other.name()));
            }
        }
    }
}

/// Render a javap-style structural listing: members in file order with
/// flags, descriptors, relocated instruction bytes, and attribute detail.
/// Two classfiles differ structurally exactly when their listings differ.
pub fn describe_classfile(cf: &ClassFile) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "class {} version {}.{}", lossy(&cf.this_class), cf.major_version, cf.minor_version);
    let _ = writeln!(out, "flags: 0x{:04x}", cf.access_flags);
    let _ = writeln!(out, "super: {}", cf.super_class.as_deref().map(lossy).unwrap_or_default());
    for i in &cf.interfaces {
        let _ = writeln!(out, "implements {}", lossy(i));
    }
    for (label, members) in [("field", &cf.fields), ("method", &cf.methods)] {
        for m in members {
            let _ = writeln!(out, "{label} 0x{:04x} {} {}", m.access_flags, lossy(&m.name), lossy(&m.descriptor));
            describe_attributes(&mut out, "  ", &m.attributes);
        }
    }
    describe_attributes(&mut out, "", &cf.attributes);
    out
}
