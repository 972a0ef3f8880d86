#ifndef QPHASE_ERROR_HPP
#define QPHASE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qphase {

/// Error raised by a computational module. what() reads "<module>: <message>".
class Error : public std::runtime_error
{
public:
    Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), m_module(std::move(module)),
        m_message(message)
    {}

    const std::string& module() const { return m_module; }
    const std::string& message() const { return m_message; }

private:
    std::string m_module;
    std::string m_message;
};

/// Invalid input (configuration or violated type invariant), as opposed to a
/// numerical failure during a run.
class ValidationError : public Error
{
public:
    using Error::Error;
};

} // namespace qphase

#endif // QPHASE_ERROR_HPP
