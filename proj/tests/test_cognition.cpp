#include <gtest/gtest.h>

#include <vector>

#include <fpe/cognition.hpp>
#include <fpe/synthetic.hpp>

using namespace fpe;

namespace {

SyntheticCognition make_agent(const synthetic::TwoContextCorpus& corpus, AgentMode mode,
                              std::optional<std::size_t> episode_length = std::nullopt) {
    return SyntheticCognition(Metacluster(corpus.spec), "motor", mode, episode_length);
}

void train_passes(SyntheticCognition& agent, const synthetic::TwoContextCorpus& corpus,
                  int passes) {
    for (int pass = 0; pass < passes; ++pass)
        for (const auto& seq : corpus.sequences)
            for (const auto& [sensor, motor] : seq)
                agent.train_step(corpus.encode_step(sensor, motor));
}

ChannelInputs sensor_only(const synthetic::TwoContextCorpus& corpus, std::size_t symbol) {
    ChannelInputs inputs;
    inputs.emplace("sensor", corpus.sensor_codec.encode(symbol));
    return inputs;
}

} // namespace

TEST(SyntheticCognition, FirstTrainStepDiagnostics) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::episodic, 3);

    TrainStepResult r = agent.train_step(corpus.encode_step(0, 0));
    for (const auto& name : agent.motoperceptive().node_names())
        EXPECT_EQ(agent.motoperceptive().node_cluster(name).total_footprints(), 1u) << name;
    EXPECT_TRUE(r.declarative_enabled);
    EXPECT_TRUE(r.declarative_pending);
    EXPECT_TRUE(r.motoperceptive.root_matched);
}

TEST(SyntheticCognition, TopFootprintCountsTrackTrainingPasses) {
    auto corpus = synthetic::make_sensorimotor_corpus(41);
    SyntheticCognition agent(Metacluster(corpus.spec), "motor", AgentMode::reactive);
    for (int pass = 0; pass < 3; ++pass)
        for (const auto& pattern : corpus.patterns)
            agent.train_step(pattern);

    const Cluster& top = agent.motoperceptive().node_cluster("top");
    ASSERT_EQ(top.total_footprints(), corpus.patterns.size());
    for (const auto& fp : top.cells()[0].cell.footprints())
        EXPECT_EQ(fp.count(), 3u);
}

TEST(SyntheticCognition, TrainingIsDeterministic) {
    auto corpus = synthetic::make_two_context_corpus();
    auto a = make_agent(corpus, AgentMode::episodic, 3);
    auto b = make_agent(corpus, AgentMode::episodic, 3);
    train_passes(a, corpus, 3);
    train_passes(b, corpus, 3);
    EXPECT_EQ(a, b);
}

TEST(SyntheticCognition, ReactiveStepRecoversAllSensorimotorPatterns) {
    auto corpus = synthetic::make_sensorimotor_corpus(43);
    SyntheticCognition agent(Metacluster(corpus.spec), "motor", AgentMode::reactive);
    for (int pass = 0; pass < 3; ++pass)
        for (const auto& pattern : corpus.patterns)
            agent.train_step(pattern);

    int correct = 0;
    for (std::size_t p = 0; p < corpus.patterns.size(); ++p) {
        ChannelInputs sensors = corpus.patterns[p];
        sensors.erase("motor");
        auto r = agent.step(sensors);
        ASSERT_TRUE(r.has_value());
        EXPECT_EQ(r->mode_used, AgentMode::reactive);
        EXPECT_FALSE(r->fell_back);
        EXPECT_EQ(r->motor.dim(), corpus.motor_codec.dim());
        EXPECT_TRUE(r->motoperceptive.root_matched); // diagnostics ride along
        EXPECT_FALSE(r->motoperceptive.node_traces.empty());
        ASSERT_TRUE(r->decoded_motor.has_value());
        if (r->decoded_motor->first == corpus.motor_symbols[p])
            ++correct;
    }
    EXPECT_EQ(correct, 8);
}

TEST(SyntheticCognition, ReactiveModeIsBlindToContext) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::reactive);
    train_passes(agent, corpus, 3);

    // Replay context a, probe; replay context c, probe. Reactive answers
    // must be identical: the probe alone determines the response.
    agent.train_step(corpus.encode_step(corpus.context_a, 0));
    auto after_a = agent.step(sensor_only(corpus, corpus.probe));
    agent.train_step(corpus.encode_step(corpus.context_c, 2));
    auto after_c = agent.step(sensor_only(corpus, corpus.probe));

    ASSERT_TRUE(after_a.has_value());
    ASSERT_TRUE(after_c.has_value());
    EXPECT_EQ(after_a->motor, after_c->motor);
    EXPECT_EQ(after_a->decoded_motor->first, after_c->decoded_motor->first);
}

TEST(SyntheticCognition, EpisodicModeDisambiguatesContexts) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::episodic, 3);
    train_passes(agent, corpus, 3);

    agent.train_step(corpus.encode_step(corpus.context_a, 0));
    auto after_a = agent.step(sensor_only(corpus, corpus.probe));
    ASSERT_TRUE(after_a.has_value());
    EXPECT_EQ(after_a->mode_used, AgentMode::episodic);
    EXPECT_FALSE(after_a->fell_back);
    EXPECT_EQ(after_a->decoded_motor->first, corpus.motor_after_a);

    agent.train_step(corpus.encode_step(corpus.context_c, 2));
    auto after_c = agent.step(sensor_only(corpus, corpus.probe));
    ASSERT_TRUE(after_c.has_value());
    EXPECT_EQ(after_c->decoded_motor->first, corpus.motor_after_c);
}

TEST(SyntheticCognition, EpisodicStepIsPureAndHistoryDetermined) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::episodic, 3);
    train_passes(agent, corpus, 3);
    agent.train_step(corpus.encode_step(corpus.context_a, 0));

    SyntheticCognition before = agent;
    auto first = agent.step(sensor_only(corpus, corpus.probe));
    auto second = agent.step(sensor_only(corpus, corpus.probe));
    EXPECT_EQ(agent, before);
    ASSERT_TRUE(first.has_value());
    ASSERT_TRUE(second.has_value());
    EXPECT_EQ(first->motor, second->motor);
    EXPECT_EQ(first->mode_used, second->mode_used);
}

TEST(SyntheticCognition, UnwarmedEpisodicFallsBackToReactive) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::episodic, 3);
    agent.train_step(corpus.encode_step(corpus.context_a, 0));

    auto r = agent.step(sensor_only(corpus, corpus.probe));
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->mode_used, AgentMode::reactive);
    EXPECT_TRUE(r->fell_back);
}

TEST(SyntheticCognition, UntrainedModelYieldsNoMatch) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::reactive);
    EXPECT_FALSE(agent.step(sensor_only(corpus, corpus.probe)).has_value());
}

TEST(SyntheticCognition, ArgumentErrors) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::reactive);
    train_passes(agent, corpus, 1);

    EXPECT_THROW(agent.step(corpus.encode_step(0, 0)), ArgumentError);
    EXPECT_THROW(agent.step(ChannelInputs{}), ArgumentError);
    ChannelInputs missing;
    missing.emplace("sensor", corpus.sensor_codec.encode(0));
    EXPECT_THROW(agent.train_step(missing), ArgumentError);

    EXPECT_THROW(SyntheticCognition(Metacluster(corpus.spec), "gripper", AgentMode::reactive),
                 LookupError);
    EXPECT_THROW(SyntheticCognition(Metacluster(corpus.spec), "motor", AgentMode::episodic),
                 ValidationError);
}

TEST(SyntheticCognition, MotorOutputStaysInRange) {
    auto corpus = synthetic::make_two_context_corpus();
    auto agent = make_agent(corpus, AgentMode::episodic, 3);
    train_passes(agent, corpus, 2);
    agent.train_step(corpus.encode_step(corpus.context_c, 2));

    auto r = agent.step(sensor_only(corpus, corpus.probe));
    ASSERT_TRUE(r.has_value());
    for (std::size_t i = 0; i < r->motor.dim(); ++i) {
        EXPECT_GE(r->motor[i], 0.0);
        EXPECT_LE(r->motor[i], 1.0);
    }
}
