#pragma once

#include <stdexcept>
#include <string>

namespace horizonlab {

// Every failure that originates from the mathematics (bad parameters, branch
// points, poles, missing roots) is a DomainError. The CLI maps these to exit
// code 1; anything else escaping is a bug.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// c0 == 0 for recip/sqrt/fractional power.
class NotInvertible : public DomainError {
 public:
  explicit NotInvertible(const std::string& what) : DomainError(what) {}
};

class UnboundVariable : public DomainError {
 public:
  explicit UnboundVariable(const std::string& name)
      : DomainError("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// A symbolic operation (term-wise integration etc.) cannot handle the form.
class UnsupportedForm : public DomainError {
 public:
  explicit UnsupportedForm(const std::string& what) : DomainError(what) {}
};

}  // namespace horizonlab
