#include "gravdec/quadrature.hpp"

#include <memory>
#include <mutex>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "gravdec/errors.hpp"

namespace gravdec::quadrature {

namespace {

constexpr std::size_t kWorkspaceSize = 4000;

struct Workspace {
    gsl_integration_workspace* ws;
    Workspace() : ws(gsl_integration_workspace_alloc(kWorkspaceSize)) {}
    ~Workspace() { gsl_integration_workspace_free(ws); }
};

double trampoline(double x, void* params) {
    auto* f = static_cast<const std::function<double(double)>*>(params);
    return (*f)(x);
}

void disable_gsl_abort() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    disable_gsl_abort();
    Workspace w;
    gsl_function gf;
    gf.function = &trampoline;
    gf.params = const_cast<std::function<double(double)>*>(&f);

    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qag(&gf, a, b, abs_tol, rel_tol, kWorkspaceSize,
                                     GSL_INTEG_GAUSS31, w.ws, &result, &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw NumericalError("quadrature: finite-interval integration failed", abserr);
    return result;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol, double abs_tol) {
    disable_gsl_abort();
    Workspace w;
    gsl_function gf;
    gf.function = &trampoline;
    gf.params = const_cast<std::function<double(double)>*>(&f);

    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qagiu(&gf, a, abs_tol, rel_tol, kWorkspaceSize,
                                       w.ws, &result, &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw NumericalError("quadrature: semi-infinite integration failed", abserr);
    return result;
}

} // namespace gravdec::quadrature
