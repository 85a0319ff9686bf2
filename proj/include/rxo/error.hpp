#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rxo {

enum class ErrorCode {
    // kernel
    UnknownAttribute,
    DuplicateAttribute,
    KindMismatch,
    HeaderMismatch,
    DuplicateOutName,
    KeyViolation,
    ForeignKeyViolation,
    UnknownRelation,
    InvalidValue,
    // parser
    LexError,
    ParseError,
    // catalog / schema
    DuplicateClass,
    UnknownParent,
    UnknownClass,
    MemberCollision,
    CyclicInheritance,
    AmbiguousMember,
    UnknownMember,
    StoredDataLoss,
    UnknownName,
    NotTraversable,
    AlreadyStored,
    NotStored,
    // query
    TerminalScalarPath,
    UnrealizedComponent,
    CycleDepthExceeded,
    AggregateMisuse,
    ProcedureNoReturn,
    Cardinality,
    RecursiveRealization,
    Unsupported,
    // runtime
    UnknownComponent,
    AssignToCalculated,
    NonCompilableBody,
    // store
    IoError,
    FormatError,
    ConstraintError,
    CounterError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::DuplicateOutName: return "DuplicateOutName";
    case ErrorCode::KeyViolation: return "KeyViolation";
    case ErrorCode::ForeignKeyViolation: return "ForeignKeyViolation";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateClass: return "DuplicateClass";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::MemberCollision: return "MemberCollision";
    case ErrorCode::CyclicInheritance: return "CyclicInheritance";
    case ErrorCode::AmbiguousMember: return "AmbiguousMember";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::StoredDataLoss: return "StoredDataLoss";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::NotTraversable: return "NotTraversable";
    case ErrorCode::AlreadyStored: return "AlreadyStored";
    case ErrorCode::NotStored: return "NotStored";
    case ErrorCode::TerminalScalarPath: return "TerminalScalarPath";
    case ErrorCode::UnrealizedComponent: return "UnrealizedComponent";
    case ErrorCode::CycleDepthExceeded: return "CycleDepthExceeded";
    case ErrorCode::AggregateMisuse: return "AggregateMisuse";
    case ErrorCode::ProcedureNoReturn: return "ProcedureNoReturn";
    case ErrorCode::Cardinality: return "Cardinality";
    case ErrorCode::RecursiveRealization: return "RecursiveRealization";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::AssignToCalculated: return "AssignToCalculated";
    case ErrorCode::NonCompilableBody: return "NonCompilableBody";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::ConstraintError: return "ConstraintError";
    case ErrorCode::CounterError: return "CounterError";
    }
    return "Error";
}

struct SourcePos {
    int line = 1;
    int column = 1;

    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    Error(ErrorCode code, const std::string& message, SourcePos pos)
        : std::runtime_error(message), code_(code), pos_(pos) {}

    ErrorCode code() const noexcept { return code_; }
    const std::optional<SourcePos>& position() const noexcept { return pos_; }

    // Attaches a position if the error does not carry one yet.
    Error with_position(SourcePos pos) const {
        Error copy = *this;
        if (!copy.pos_) copy.pos_ = pos;
        return copy;
    }

    std::string describe() const {
        std::string out;
        if (pos_) {
            out += "line " + std::to_string(pos_->line) + ", column " + std::to_string(pos_->column) + ": ";
        }
        out += std::string(to_string(code_)) + ": " + what();
        return out;
    }

private:
    ErrorCode code_;
    std::optional<SourcePos> pos_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace rxo
