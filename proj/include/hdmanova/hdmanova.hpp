#ifndef HDMANOVA_HDMANOVA_HPP
#define HDMANOVA_HDMANOVA_HPP

#include "hdmanova/competitors.hpp"
#include "hdmanova/errors.hpp"
#include "hdmanova/gig.hpp"
#include "hdmanova/harness.hpp"
#include "hdmanova/null_distribution.hpp"
#include "hdmanova/random_sample_size.hpp"
#include "hdmanova/rng.hpp"
#include "hdmanova/simulation.hpp"
#include "hdmanova/special_functions.hpp"
#include "hdmanova/statistic.hpp"
#include "hdmanova/talbot.hpp"

#endif
