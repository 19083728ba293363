//! Tiny hand-assembled classfiles for the fixture corpus. Pool sizes stay
//! under 30 entries so the fixtures are auditable by eye, and no compiler
//! toolchain is needed at test time.

use crate::classfile::{
    write_classfile, AttributeInfo, ClassFile, CodeAttribute, CodeRef, Const, MemberInfo,
};

#[derive(Clone, Copy, Debug, Default)]
pub struct GreeterShape {
    /// Emit `helper` before `greet`, modeling a compiler that ordered
    /// methods differently.
    pub swap_methods: bool,
    /// Add one more LineNumberTable row to `greet`, modeling a JDK that
    /// records the trailing return instruction.
    pub extra_line_number: bool,
}

/// `org/example/demo/Greeter`: one static string constant, a constructor,
/// and two small methods.
pub fn greeter_class(shape: &GreeterShape) -> Vec<u8> {
    let object_init = Const::MethodRef {
        class: b"java/lang/Object".to_vec(),
        name: b"<init>".to_vec(),
        descriptor: b"()V".to_vec(),
    };
    let greeting = Const::Str(b"hello from demo".to_vec());

    let init = MemberInfo {
        access_flags: 0x0001,
        name: b"<init>".to_vec(),
        descriptor: b"()V".to_vec(),
        attributes: vec![AttributeInfo::Code(CodeAttribute {
            max_stack: 1,
            max_locals: 1,
            code: vec![0x2A, 0xB7, 0x00, 0x00, 0xB1],
            pool_refs: vec![CodeRef { offset: 2, narrow: false, constant: object_init }],
            exception_table: Vec::new(),
            attributes: vec![AttributeInfo::LineNumberTable(vec![(0, 3)])],
        })],
    };
    let mut greet_lines = vec![(0u16, 7u16)];
    if shape.extra_line_number {
        greet_lines.push((2, 8));
    }
    let greet = MemberInfo {
        access_flags: 0x0001,
        name: b"greet".to_vec(),
        descriptor: b"()Ljava/lang/String;".to_vec(),
        attributes: vec![AttributeInfo::Code(CodeAttribute {
            max_stack: 1,
            max_locals: 1,
            code: vec![0x12, 0x00, 0xB0],
            pool_refs: vec![CodeRef { offset: 1, narrow: true, constant: greeting.clone() }],
            exception_table: Vec::new(),
            attributes: vec![AttributeInfo::LineNumberTable(greet_lines)],
        })],
    };
    let helper = MemberInfo {
        access_flags: 0x0002,
        name: b"helper".to_vec(),
        descriptor: b"()I".to_vec(),
        attributes: vec![AttributeInfo::Code(CodeAttribute {
            max_stack: 1,
            max_locals: 1,
            code: vec![0x04, 0xAC],
            pool_refs: Vec::new(),
            exception_table: Vec::new(),
            attributes: Vec::new(),
        })],
    };

    let methods = if shape.swap_methods { vec![init, helper, greet] } else { vec![init, greet, helper] };
    let cf = ClassFile {
        minor_version: 0,
        major_version: 52,
        access_flags: 0x0021,
        this_class: b"org/example/demo/Greeter".to_vec(),
        super_class: Some(b"java/lang/Object".to_vec()),
        interfaces: Vec::new(),
        fields: vec![MemberInfo {
            access_flags: 0x0019, // public static final
            name: b"GREETING".to_vec(),
            descriptor: b"Ljava/lang/String;".to_vec(),
            attributes: vec![AttributeInfo::ConstantValue(greeting)],
        }],
        methods,
        attributes: vec![AttributeInfo::SourceFile(b"Greeter.java".to_vec())],
    };
    write_classfile(&cf).expect("fixture classfile is well-formed")
}

/// Minimal `module-info.class` whose Module attribute embeds a compiler
/// version string. Assembled at the byte level because the Module attribute
/// is opaque to the structural model.
pub fn module_info_class(java_version: &str) -> Vec<u8> {
    let mut b = Vec::new();
    let u16be = |out: &mut Vec<u8>, v: u16| out.extend_from_slice(&v.to_be_bytes());
    let utf8 = |out: &mut Vec<u8>, s: &[u8]| {
        out.push(1);
        out.extend_from_slice(&(s.len() as u16).to_be_bytes());
        out.extend_from_slice(s);
    };
    b.extend_from_slice(&0xCAFE_BABEu32.to_be_bytes());
    u16be(&mut b, 0); // minor
    u16be(&mut b, 53); // major, Java 9
    u16be(&mut b, 7); // pool count
    utf8(&mut b, b"module-info"); // #1
    b.push(7); // #2 Class #1
    u16be(&mut b, 1);
    utf8(&mut b, b"Module"); // #3
    utf8(&mut b, b"demo"); // #4
    b.push(19); // #5 Module #4
    u16be(&mut b, 4);
    utf8(&mut b, java_version.as_bytes()); // #6
    u16be(&mut b, 0x8000); // ACC_MODULE
    u16be(&mut b, 2); // this_class
    u16be(&mut b, 0); // no super
    u16be(&mut b, 0); // interfaces
    u16be(&mut b, 0); // fields
    u16be(&mut b, 0); // methods
    u16be(&mut b, 1); // one attribute: Module
    u16be(&mut b, 3); // name
    b.extend_from_slice(&16u32.to_be_bytes());
    u16be(&mut b, 5); // module name (#5)
    u16be(&mut b, 0); // flags
    u16be(&mut b, 6); // version utf8
    u16be(&mut b, 0); // requires
    u16be(&mut b, 0); // exports
    u16be(&mut b, 0); // opens
    u16be(&mut b, 0); // uses
    u16be(&mut b, 0); // provides
    b
}
