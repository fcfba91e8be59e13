#include <cstdio>
#include <sstream>
#include <string>

#include "tasadm/problems.hpp"

// Container layout, one item per line:
//   tasadm-instance 1
//   regularizer <none|l1|lhalf>
//   mu <v> / lipschitz_g <v> / sigma_b <v> / lower_bound <v|none>
//   loss <quadratic|logistic>
//   A <rows> <cols>, B <rows> <cols>, b <n>, then c <n> or features/labels
//   optional x_orig <n>
//   end
// Each dimensioned item is followed by its entries in column-major order.

namespace tasadm {

namespace {

constexpr const char* kMagic = "tasadm-instance";
constexpr int kVersion = 1;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_matrix(std::ostream& os, const char* name, const Matrix& m) {
    os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            os << fmt(m(i, j)) << (i + 1 < m.rows() ? ' ' : '\n');
        }
    }
}

void put_vector(std::ostream& os, const char* name, const Vector& v) {
    os << name << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        os << fmt(v[i]) << (i + 1 < v.size() ? ' ' : '\n');
    }
    if (v.size() == 0) os << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    std::string word() {
        std::string w;
        if (!(is_ >> w)) throw InvalidInput("read_instance: unexpected end of input");
        return w;
    }

    void expect(const std::string& key) {
        const std::string w = word();
        if (w != key) throw InvalidInput("read_instance: expected '" + key + "', got '" + w + "'");
    }

    double number() {
        const std::string w = word();
        try {
            std::size_t used = 0;
            const double v = std::stod(w, &used);
            if (used != w.size()) throw std::invalid_argument(w);
            return v;
        } catch (const std::exception&) {
            throw InvalidInput("read_instance: bad number '" + w + "'");
        }
    }

    Eigen::Index count() {
        const double v = number();
        if (!(v >= 0.0) || v != static_cast<double>(static_cast<long long>(v))) {
            throw InvalidInput("read_instance: bad dimension");
        }
        return static_cast<Eigen::Index>(v);
    }

    Matrix matrix(const std::string& key) {
        expect(key);
        const Eigen::Index r = count();
        const Eigen::Index c = count();
        Matrix m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = number();
        return m;
    }

    Vector vector_body() {
        const Eigen::Index n = count();
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = number();
        return v;
    }

    Vector vector(const std::string& key) {
        expect(key);
        return vector_body();
    }

private:
    std::istream& is_;
};

Regularizer parse_regularizer(const std::string& s) {
    if (s == "none") return Regularizer::none;
    if (s == "l1") return Regularizer::l_one;
    if (s == "lhalf") return Regularizer::l_half;
    throw InvalidInput("read_instance: unknown regularizer '" + s + "'");
}

}  // namespace

void write_instance(std::ostream& os, const ProblemInstance& prob, const std::optional<Vector>& x_orig) {
    prob.validate();
    os << kMagic << ' ' << kVersion << '\n';
    os << "regularizer " << to_string(prob.f_kind) << '\n';
    os << "mu " << fmt(prob.mu) << '\n';
    os << "lipschitz_g " << fmt(prob.lipschitz_g) << '\n';
    os << "sigma_b " << fmt(prob.sigma_b) << '\n';
    os << "lower_bound " << (prob.lower_bound ? fmt(*prob.lower_bound) : std::string("none")) << '\n';
    if (const auto* q = std::get_if<QuadraticLoss>(&prob.g)) {
        os << "loss quadratic\n";
        put_matrix(os, "A", *prob.a);
        put_matrix(os, "B", *prob.b_mat);
        put_vector(os, "b", prob.b);
        put_vector(os, "c", q->c);
    } else {
        const auto& lg = std::get<LogisticLoss>(prob.g);
        os << "loss logistic\n";
        put_matrix(os, "A", *prob.a);
        put_matrix(os, "B", *prob.b_mat);
        put_vector(os, "b", prob.b);
        put_matrix(os, "features", lg.features);
        put_vector(os, "labels", lg.labels);
    }
    if (x_orig) put_vector(os, "x_orig", *x_orig);
    os << "end\n";
    if (!os) throw Error("write_instance: stream write failed");
}

StoredInstance read_instance(std::istream& is) {
    Reader rd(is);
    rd.expect(kMagic);
    if (rd.number() != kVersion) throw InvalidInput("read_instance: unsupported version");
    rd.expect("regularizer");
    const Regularizer reg = parse_regularizer(rd.word());
    rd.expect("mu");
    const double mu = rd.number();
    rd.expect("lipschitz_g");
    const double lg = rd.number();
    rd.expect("sigma_b");
    const double sb = rd.number();
    rd.expect("lower_bound");
    std::optional<double> lower;
    {
        const std::string w = rd.word();
        if (w != "none") {
            std::istringstream one(w);
            lower = Reader(one).number();
        }
    }
    rd.expect("loss");
    const std::string loss_kind = rd.word();
    Matrix a = rd.matrix("A");
    Matrix bm = rd.matrix("B");
    Vector b = rd.vector("b");
    SmoothLoss g;
    if (loss_kind == "quadratic") {
        g = QuadraticLoss{rd.vector("c")};
    } else if (loss_kind == "logistic") {
        LogisticLoss l;
        l.features = rd.matrix("features");
        l.labels = rd.vector("labels");
        g = std::move(l);
    } else {
        throw InvalidInput("read_instance: unknown loss '" + loss_kind + "'");
    }

    StoredInstance out;
    std::string w = rd.word();
    if (w == "x_orig") {
        out.x_orig = rd.vector_body();
        w = rd.word();
    }
    if (w != "end") throw InvalidInput("read_instance: expected 'end', got '" + w + "'");
    out.problem = make_instance(std::move(a), std::move(bm), std::move(b), reg, mu, std::move(g), lg, sb,
                                lower);
    if (out.x_orig) require_dim(out.x_orig->size(), out.problem.x_dim(), "read_instance: x_orig");
    return out;
}

}  // namespace tasadm
