#include "skewirt/errors.hpp"

#include <filesystem>

namespace skewirt {

ExitStatus classify(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const UsageError&) {
    return {kExitUsage, "error"};
  } catch (const DataError&) {
    return {kExitData, "data error"};
  } catch (const NumericalError&) {
    return {kExitNumerical, "numerical error"};
  } catch (const std::filesystem::filesystem_error&) {
    return {kExitData, "data error"};
  } catch (const std::invalid_argument&) {
    return {kExitUsage, "error"};
  } catch (const std::domain_error&) {
    return {kExitUsage, "error"};
  }
}

}  // namespace skewirt
