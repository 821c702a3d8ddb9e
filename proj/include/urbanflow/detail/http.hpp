#pragma once

// httplib drags in <resolv.h>, whose `_res` macro rewrites Eigen's parameter
// names. Include httplib only through this header.

#include <httplib.h>

#ifdef _res
#undef _res
#endif
